//! Unsteady 1-D method of characteristics for a gas with `p = s ρ^γ`.
//!
//! The net is built level by level: the C+ characteristic from node `i` and
//! the C− characteristic from node `i + 1` of one level meet at node `i` of
//! the next, so each level has one node fewer. Along C± the solver enforces
//!
//! ```text
//! du ± (2/(γ−1)) da ∓ a/(γ(γ−1)s) ds = 0
//! ```
//!
//! (the relation `du ± dp/(ρa) = 0` rewritten with `p = s ρ^γ`), and the
//! entropy function `s` is carried unchanged along the particle path C0.
//! Coefficients are averaged over each link and the node position is found
//! by fixed-point iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{EntropyConvention, GasModel, PrimitiveState};

/// State at one point of the `(x, t)` plane; `s` is the entropy function `p/ρ^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharNode {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub a: f64,
    pub s: f64,
}

impl CharNode {
    pub fn from_primitive(x: f64, t: f64, q: &PrimitiveState, m: &GasModel) -> Result<Self> {
        q.validate()?;
        let entropy_function = m.with_convention(EntropyConvention::EntropyFunction).entropy(q.rho, q.p);
        Ok(Self {
            x,
            t,
            u: q.u[0],
            a: m.sound_speed(q.rho, q.p),
            s: entropy_function,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !(self.s > 0.0) || !self.u.is_finite() || !self.x.is_finite() || !self.t.is_finite() {
            return Err(Error::NonPhysicalState(format!(
                "characteristic node at x={} t={} has a={} s={}",
                self.x, self.t, self.a, self.s
            )));
        }
        Ok(())
    }

    pub fn density(&self, m: &GasModel) -> f64 {
        m.density_from_sound_speed(self.a, self.s)
    }

    pub fn pressure(&self, m: &GasModel) -> f64 {
        self.s * self.density(m).powf(m.gamma())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "C+")]
    CPlus,
    #[serde(rename = "C-")]
    CMinus,
    #[serde(rename = "C0")]
    C0,
}

/// `(u + a, u − a, u)`.
pub fn char_slopes(n: &CharNode) -> (f64, f64, f64) {
    (n.u + n.a, n.u - n.a, n.u)
}

/// `J± = u ± 2a/(γ−1)`.
pub fn riemann_invariants(n: &CharNode, m: &GasModel) -> (f64, f64) {
    let c = 2.0 / (m.gamma() - 1.0);
    (n.u + c * n.a, n.u - c * n.a)
}

/// `|Δu ± (2/(γ−1))Δa ∓ (ā/(γ(γ−1)s̄))Δs|` between two nodes on a C± link,
/// with link averages `ā`, `s̄`. C0 links report `|Δs|`.
pub fn compat_residual(from: &CharNode, to: &CharNode, family: Family, m: &GasModel) -> f64 {
    let g = m.gamma();
    let du = to.u - from.u;
    let da = to.a - from.a;
    let ds = to.s - from.s;
    let a_bar = 0.5 * (from.a + to.a);
    let s_bar = 0.5 * (from.s + to.s);
    let entropy = a_bar / (g * (g - 1.0) * s_bar) * ds;
    let acoustic = 2.0 / (g - 1.0) * da;
    match family {
        Family::CPlus => (du + acoustic - entropy).abs(),
        Family::CMinus => (du - acoustic + entropy).abs(),
        Family::C0 => ds.abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEvent {
    pub t_star: f64,
    pub x_star: f64,
    pub family: Family,
}

/// Parents of a node on the previous level. The C0 foot lies at
/// `(1 − c0_weight)·cplus + c0_weight·cminus` along the segment joining them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeLinks {
    pub cplus: usize,
    pub cminus: usize,
    pub c0_weight: f64,
}

impl NodeLinks {
    /// Parent closest to the C0 foot.
    pub fn c0_parent(&self) -> usize {
        if self.c0_weight <= 0.5 {
            self.cplus
        } else {
            self.cminus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MocOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for MocOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20,
            tolerance: 1e-12,
        }
    }
}

/// Characteristic net. Level `k` node `i` lies on C+ chain `i` and C− chain
/// `i + k`; C0 chains follow the nearest foot parent.
#[derive(Debug, Clone, PartialEq)]
pub struct CharNet {
    gamma: f64,
    levels: Vec<Vec<CharNode>>,
    links: Vec<Vec<NodeLinks>>,
    envelope: Option<EnvelopeEvent>,
}

impl CharNet {
    pub fn levels(&self) -> &[Vec<CharNode>] {
        &self.levels
    }

    /// Links of level `k` (empty for the initial level).
    pub fn links(&self, k: usize) -> &[NodeLinks] {
        if k == 0 {
            &[]
        } else {
            &self.links[k - 1]
        }
    }

    pub fn envelope(&self) -> Option<EnvelopeEvent> {
        self.envelope
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nodes(&self) -> impl Iterator<Item = &CharNode> {
        self.levels.iter().flatten()
    }

    /// Number of chains in a family (C0 chains start at every initial node).
    pub fn chain_count(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// Nodes of one C+ or C− chain in time order.
    pub fn chain(&self, family: Family, id: usize) -> Vec<CharNode> {
        let mut out = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            let index = match family {
                Family::CPlus => Some(id),
                Family::CMinus => id.checked_sub(k),
                Family::C0 => None,
            };
            match index.and_then(|i| level.get(i)) {
                Some(n) => out.push(*n),
                None if k > 0 => break,
                None => {}
            }
        }
        out
    }
}

fn validate_initial(initial: &[CharNode]) -> Result<()> {
    if initial.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 initial nodes, got {}",
            initial.len()
        )));
    }
    for n in initial {
        n.validate()?;
    }
    if initial.windows(2).any(|w| !(w[1].x > w[0].x)) {
        return Err(Error::InvalidInput("initial nodes must be sorted by increasing x".into()));
    }
    let t0 = initial[0].t;
    if initial.iter().any(|n| n.t != t0) {
        return Err(Error::InvalidInput("initial nodes must share one time".into()));
    }
    Ok(())
}

pub fn advance_net(initial: &[CharNode], t_end: f64, m: &GasModel) -> Result<CharNet> {
    advance_net_with(initial, t_end, m, MocOptions::default())
}

pub fn advance_net_with(initial: &[CharNode], t_end: f64, m: &GasModel, opts: MocOptions) -> Result<CharNet> {
    validate_initial(initial)?;
    let g = m.gamma();
    let mut levels = vec![initial.to_vec()];
    let mut links: Vec<Vec<NodeLinks>> = Vec::new();
    let mut tracker = EnvelopeTracker::new(initial);
    let mut envelope = None;

    while levels.last().map_or(0, Vec::len) >= 2 {
        let prev = levels.last().unwrap();
        let level_index = levels.len();
        let mut next = Vec::with_capacity(prev.len() - 1);
        let mut next_links = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let (node, weight) = solve_node(&prev[i], &prev[i + 1], g, opts, level_index)?;
            next.push(node);
            next_links.push(NodeLinks {
                cplus: i,
                cminus: i + 1,
                c0_weight: weight,
            });
        }
        if next.iter().map(|n| n.t).fold(f64::INFINITY, f64::min) > t_end {
            break;
        }
        if let Some(event) = tracker.observe(&levels, &next) {
            envelope = Some(event);
            break;
        }
        levels.push(next);
        links.push(next_links);
    }
    Ok(CharNet {
        gamma: g,
        levels,
        links,
        envelope,
    })
}

/// New node where the C+ from `l` meets the C− from `r`; also returns the C0
/// foot weight on the segment `l`–`r`.
fn solve_node(l: &CharNode, r: &CharNode, g: f64, opts: MocOptions, level: usize) -> Result<(CharNode, f64)> {
    let c = 2.0 / (g - 1.0);
    let entropy_coefficient = |a: f64, s: f64| a / (g * (g - 1.0) * s);
    let mut p = CharNode {
        x: 0.0,
        t: 0.0,
        u: 0.5 * (l.u + r.u),
        a: 0.5 * (l.a + r.a),
        s: 0.5 * (l.s + r.s),
    };
    let mut weight = 0.5;
    // first pass uses parent slopes only
    let mut first = true;
    for _ in 0..opts.max_iterations {
        let (lp, lm) = if first {
            (l.u + l.a, r.u - r.a)
        } else {
            (0.5 * (l.u + l.a + p.u + p.a), 0.5 * (r.u - r.a + p.u - p.a))
        };
        let t = (r.x - l.x + lp * l.t - lm * r.t) / (lp - lm);
        let x = l.x + lp * (t - l.t);

        // C0 foot on the segment l–r
        let mut w = weight;
        for _ in 0..opts.max_iterations {
            let u_foot = l.u + w * (r.u - l.u);
            let slope = if first { u_foot } else { 0.5 * (p.u + u_foot) };
            let denom = (r.x - l.x) - slope * (r.t - l.t);
            let w_new = (x - l.x - slope * (t - l.t)) / denom;
            let done = (w_new - w).abs() <= opts.tolerance;
            w = w_new;
            if done {
                break;
            }
        }
        let s = l.s + w * (r.s - l.s);
        let b_plus = entropy_coefficient(0.5 * (l.a + p.a), 0.5 * (l.s + s)) * (s - l.s);
        let b_minus = entropy_coefficient(0.5 * (r.a + p.a), 0.5 * (r.s + s)) * (s - r.s);
        let q_plus = l.u + c * l.a + b_plus;
        let q_minus = r.u - c * r.a - b_minus;
        let next = CharNode {
            x,
            t,
            u: 0.5 * (q_plus + q_minus),
            a: (q_plus - q_minus) / (2.0 * c),
            s,
        };
        let scale = l.a.max(r.a);
        let length = (r.x - l.x).abs().max(scale * (t - l.t).abs());
        let converged = !first
            && (next.u - p.u).abs() <= opts.tolerance * scale
            && (next.a - p.a).abs() <= opts.tolerance * scale
            && (next.x - p.x).abs() <= opts.tolerance * length
            && (next.t - p.t).abs() * scale <= opts.tolerance * length
            && (next.s - p.s).abs() <= opts.tolerance * next.s.abs();
        p = next;
        weight = w;
        first = false;
        if converged {
            p.validate()?;
            return Ok((p, weight));
        }
    }
    Err(Error::NonConvergence {
        level,
        iterations: opts.max_iterations,
    })
}

/// Watches adjacent same-family chain pairs for a sign change of their
/// separation at a common time.
struct EnvelopeTracker {
    x0: Vec<f64>,
    /// Last `(t, J)` for C+ pair `i` (chains `i`, `i+1`)
    plus: Vec<Option<(f64, f64)>>,
    /// Last `(t, J)` for C− pair `j` (chains `j`, `j+1`)
    minus: Vec<Option<(f64, f64)>>,
    plus_chains: Vec<Vec<(f64, f64)>>,
    minus_chains: Vec<Vec<(f64, f64)>>,
}

/// Position of a chain at time `t` by linear interpolation of its `(t, x)`
/// samples, extrapolating from the last segment.
fn chain_position(chain: &[(f64, f64)], t: f64) -> f64 {
    if chain.len() == 1 {
        return chain[0].1;
    }
    let idx = chain.partition_point(|(ti, _)| *ti < t).clamp(1, chain.len() - 1);
    let (t0, x0) = chain[idx - 1];
    let (t1, x1) = chain[idx];
    if t1 == t0 {
        return x1;
    }
    x0 + (x1 - x0) * (t - t0) / (t1 - t0)
}

impl EnvelopeTracker {
    fn new(initial: &[CharNode]) -> Self {
        let n = initial.len();
        let start: Vec<Vec<(f64, f64)>> = initial.iter().map(|p| vec![(p.t, p.x)]).collect();
        Self {
            x0: initial.iter().map(|p| p.x).collect(),
            plus: vec![Some((initial[0].t, 1.0)); n - 1],
            minus: vec![Some((initial[0].t, 1.0)); n - 1],
            plus_chains: start.clone(),
            minus_chains: start,
        }
    }

    fn observe(&mut self, levels: &[Vec<CharNode>], next: &[CharNode]) -> Option<EnvelopeEvent> {
        let k = levels.len();
        for (i, p) in next.iter().enumerate() {
            self.plus_chains[i].push((p.t, p.x));
            self.minus_chains[i + k].push((p.t, p.x));
        }
        let mut first: Option<EnvelopeEvent> = None;
        let mut consider = |event: EnvelopeEvent| {
            if first.is_none_or(|f| event.t_star < f.t_star) {
                first = Some(event);
            }
        };
        for (i, p) in next.iter().enumerate() {
            // C+ pair (i, i+1) and (i-1, i) evaluated at this node's time
            for pair in [i.checked_sub(1), Some(i)].into_iter().flatten() {
                if pair + 1 >= self.plus_chains.len() {
                    continue;
                }
                let left = chain_position(&self.plus_chains[pair], p.t);
                let right = chain_position(&self.plus_chains[pair + 1], p.t);
                let j = (right - left) / (self.x0[pair + 1] - self.x0[pair]);
                if let Some(e) = crossing(&mut self.plus[pair], p.t, j, 0.5 * (left + right), Family::CPlus) {
                    consider(e);
                }
            }
            let chain = i + k;
            for pair in [chain.checked_sub(1), Some(chain)].into_iter().flatten() {
                if pair + 1 >= self.minus_chains.len() {
                    continue;
                }
                let left = chain_position(&self.minus_chains[pair], p.t);
                let right = chain_position(&self.minus_chains[pair + 1], p.t);
                let j = (right - left) / (self.x0[pair + 1] - self.x0[pair]);
                if let Some(e) = crossing(&mut self.minus[pair], p.t, j, 0.5 * (left + right), Family::CMinus) {
                    consider(e);
                }
            }
        }
        first
    }
}

fn crossing(last: &mut Option<(f64, f64)>, t: f64, j: f64, x: f64, family: Family) -> Option<EnvelopeEvent> {
    let previous = last.replace((t, j));
    let (t_prev, j_prev) = previous?;
    if j_prev > 0.0 && j <= 0.0 && t > t_prev {
        let t_star = t_prev + (t - t_prev) * j_prev / (j_prev - j);
        return Some(EnvelopeEvent { t_star, x_star: x, family });
    }
    None
}

/// `J(t) = Δx(t)/Δx₀` for one pair of adjacent chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianSeries {
    pub x0_left: f64,
    pub x0_right: f64,
    pub t: Vec<f64>,
    pub j: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianTrace {
    pub family: Family,
    pub series: Vec<JacobianSeries>,
}

/// Separation of adjacent C+ or C− chains, sampled at the node times of the
/// left chain of each pair, relative to the initial separation.
pub fn jacobian_trace(net: &CharNet, family: Family) -> Result<JacobianTrace> {
    if family == Family::C0 {
        return Err(Error::InvalidInput("jacobian traces are defined for C+ and C− only".into()));
    }
    let n = net.chain_count();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 characteristics".into()));
    }
    let chains: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|id| net.chain(family, id).iter().map(|p| (p.t, p.x)).collect())
        .collect();
    let series = (0..n - 1)
        .map(|i| {
            let (left, right) = (&chains[i], &chains[i + 1]);
            let dx0 = right[0].1 - left[0].1;
            let mut t = Vec::with_capacity(left.len());
            let mut j = Vec::with_capacity(left.len());
            for &(ti, xi) in left {
                let last_right = right.last().map_or(f64::NEG_INFINITY, |p| p.0);
                if ti > last_right && !t.is_empty() {
                    // beyond the partner chain's determinacy range
                    break;
                }
                t.push(ti);
                j.push((chain_position(right, ti) - xi) / dx0);
            }
            if let Some(first) = j.first_mut() {
                *first = 1.0;
            }
            JacobianSeries {
                x0_left: left[0].1,
                x0_right: right[0].1,
                t,
                j,
            }
        })
        .collect();
    Ok(JacobianTrace { family, series })
}

/// Envelope of the computed net (first crossing of adjacent same-family chains).
pub fn detect_envelope(net: &CharNet) -> Option<EnvelopeEvent> {
    net.envelope()
}

/// Breaking time of a simple wave with straight characteristics
/// `x = x₀ + λ(x₀)t`: `t* = −1/min λ′`, or `None` when no slope is negative.
/// `λ′` is differenced from samples over increasing `x0`.
pub fn detect_envelope_analytic(x0: &[f64], lambda: &[f64], family: Family) -> Result<Option<EnvelopeEvent>> {
    if x0.len() != lambda.len() {
        return Err(Error::ShapeMismatch {
            expected: x0.len(),
            actual: lambda.len(),
        });
    }
    if x0.len() < 3 || x0.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("need at least 3 samples with increasing x0".into()));
    }
    let slopes = crate::stencil::differentiate(x0, lambda);
    let (idx, min) = slopes
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, s)| if *s < best.1 { (i, *s) } else { best });
    // slopes at round-off level count as flat
    let scale = lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs())) / (x0[x0.len() - 1] - x0[0]);
    if !(min < -1e-12 * scale) {
        return Ok(None);
    }
    let t_star = -1.0 / min;
    Ok(Some(EnvelopeEvent {
        t_star,
        x_star: x0[idx] + lambda[idx] * t_star,
        family,
    }))
}

/// Closure residuals of the invariants carried by each family.
///
/// * C0: largest gap between the solver's linearly interpolated foot entropy
///   and a quadratic interpolation through three previous-level nodes, the
///   local interpolation error of `s` transport.
/// * C±: largest [`compat_residual`] over all C± links, equal to `|ΔJ±|` in
///   isentropic flow.
pub fn pseudostructure_residual(net: &CharNet, family: Family, m: &GasModel) -> f64 {
    let mut worst = 0.0_f64;
    for k in 1..net.levels.len() {
        let prev = &net.levels[k - 1];
        for (node, link) in net.levels[k].iter().zip(net.links(k)) {
            let r = match family {
                Family::CPlus => compat_residual(&prev[link.cplus], node, Family::CPlus, m),
                Family::CMinus => compat_residual(&prev[link.cminus], node, Family::CMinus, m),
                Family::C0 => {
                    let (l, r) = (&prev[link.cplus], &prev[link.cminus]);
                    let x_foot = l.x + link.c0_weight * (r.x - l.x);
                    let quadratic = quadratic_entropy(prev, link.cplus, x_foot);
                    (node.s - quadratic).abs()
                }
            };
            worst = worst.max(r);
        }
    }
    worst
}

/// Quadratic interpolation of `s` over x through the segment starting at
/// `left` and its better-centred neighbour.
fn quadratic_entropy(level: &[CharNode], left: usize, x: f64) -> f64 {
    let n = level.len();
    let start = if n < 3 {
        return level[left].s + (x - level[left].x) / (level[left + 1].x - level[left].x) * (level[left + 1].s - level[left].s);
    } else if left == 0 {
        0
    } else if left + 2 >= n {
        n - 3
    } else {
        // pick the neighbour on the side of the foot
        let mid = 0.5 * (level[left].x + level[left + 1].x);
        if x < mid {
            left - 1
        } else {
            left
        }
    };
    let pts = &level[start..start + 3];
    let mut value = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for j in 0..3 {
            if i != j {
                basis *= (x - pts[j].x) / (pts[i].x - pts[j].x);
            }
        }
        value += basis * pts[i].s;
    }
    value
}
