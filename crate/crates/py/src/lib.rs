//! Python bindings for the core types and operations.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vortigen::evoform::{
    commutator, crocco_normal_coefficient, default_equilibrium_tolerance, equilibrium_classifier, viscous_a1,
    CroccoSign, Equilibrium, ForceModel, FormCoefficients, ProductionVariant, TransportModel,
};
use vortigen::fields::{self, StructuredGrid2D};
use vortigen::jumps::{self, Surface, SurfaceKind};
use vortigen::moc::{self, Family};
use vortigen::{thermo, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. }
        | Error::StagnationAtSeed { .. }
        | Error::DegenerateTrajectory(_)
        | Error::TooCloseToBoundary(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    match name {
        "C+" | "cplus" => Ok(Family::CPlus),
        "C-" | "cminus" => Ok(Family::CMinus),
        "C0" | "c0" => Ok(Family::C0),
        _ => Err(PyValueError::new_err(format!("unknown family {name:?}; use 'C+', 'C-' or 'C0'"))),
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::CPlus => "C+",
        Family::CMinus => "C-",
        Family::C0 => "C0",
    }
}

/// Calorically perfect gas.
#[pyclass(name = "GasModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGasModel(vortigen::GasModel);

#[pymethods]
impl PyGasModel {
    #[new]
    #[pyo3(signature = (gamma=1.4, r=1.0))]
    fn new(gamma: f64, r: f64) -> PyResult<Self> {
        vortigen::GasModel::new(gamma, r).map(Self).map_err(to_py)
    }

    /// Same gas with the specific entropy `c_v ln(p/rho^gamma) + s_ref`.
    fn specific(&self, s_ref: f64) -> Self {
        Self(self.0.specific(s_ref))
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        self.0.sound_speed(rho, p)
    }

    fn temperature(&self, rho: f64, p: f64) -> f64 {
        self.0.temperature(rho, p)
    }

    fn entropy(&self, rho: f64, p: f64) -> f64 {
        self.0.entropy(rho, p)
    }

    fn __repr__(&self) -> String {
        format!("GasModel(gamma={}, r={}, convention={:?})", self.0.gamma(), self.0.r(), self.0.convention())
    }
}

/// Temperature, sound speed, entropy, energies and total enthalpy of a state.
#[pyfunction]
#[pyo3(signature = (rho, u, v, p, gas))]
fn derive_state<'py>(py: Python<'py>, rho: f64, u: f64, v: f64, p: f64, gas: &PyGasModel) -> PyResult<Bound<'py, PyDict>> {
    let q = vortigen::PrimitiveState::new(rho, [u, v], p);
    let d = thermo::derive_state(&q, &gas.0).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("temperature", d.temperature)?;
    out.set_item("sound_speed", d.sound_speed)?;
    out.set_item("entropy", d.entropy)?;
    out.set_item("internal_energy", d.internal_energy)?;
    out.set_item("enthalpy", d.enthalpy)?;
    out.set_item("total_enthalpy", d.total_enthalpy)?;
    Ok(out)
}

/// A point of the (x, t) plane; `s` is the entropy function `p/rho^gamma`.
#[pyclass(name = "CharNode", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyCharNode(moc::CharNode);

#[pymethods]
impl PyCharNode {
    #[new]
    fn new(x: f64, t: f64, u: f64, a: f64, s: f64) -> PyResult<Self> {
        let n = moc::CharNode { x, t, u, a, s };
        n.validate().map_err(to_py)?;
        Ok(Self(n))
    }

    #[staticmethod]
    fn from_primitive(x: f64, rho: f64, u: f64, p: f64, gas: &PyGasModel) -> PyResult<Self> {
        moc::CharNode::from_primitive(x, 0.0, &vortigen::PrimitiveState::one_d(rho, u, p), &gas.0)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    #[getter]
    fn u(&self) -> f64 {
        self.0.u
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn s(&self) -> f64 {
        self.0.s
    }

    /// `(J+, J-)`.
    fn riemann_invariants(&self, gas: &PyGasModel) -> (f64, f64) {
        moc::riemann_invariants(&self.0, &gas.0)
    }

    fn __repr__(&self) -> String {
        let n = self.0;
        format!("CharNode(x={}, t={}, u={}, a={}, s={})", n.x, n.t, n.u, n.a, n.s)
    }
}

/// First envelope (shock origination) of a characteristic family.
#[pyclass(name = "EnvelopeEvent", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyEnvelopeEvent {
    t_star: f64,
    x_star: f64,
    family: &'static str,
}

impl From<moc::EnvelopeEvent> for PyEnvelopeEvent {
    fn from(e: moc::EnvelopeEvent) -> Self {
        Self {
            t_star: e.t_star,
            x_star: e.x_star,
            family: family_name(e.family),
        }
    }
}

#[pymethods]
impl PyEnvelopeEvent {
    fn __repr__(&self) -> String {
        format!("EnvelopeEvent(t_star={}, x_star={}, family={:?})", self.t_star, self.x_star, self.family)
    }
}

#[pyclass(name = "CharNet", frozen)]
struct PyCharNet {
    net: moc::CharNet,
    gas: vortigen::GasModel,
}

#[pymethods]
impl PyCharNet {
    /// Nodes level by level.
    #[getter]
    fn levels(&self) -> Vec<Vec<PyCharNode>> {
        self.net
            .levels()
            .iter()
            .map(|l| l.iter().copied().map(PyCharNode).collect())
            .collect()
    }

    #[getter]
    fn envelope(&self) -> Option<PyEnvelopeEvent> {
        self.net.envelope().map(Into::into)
    }

    fn node_count(&self) -> usize {
        self.net.nodes().count()
    }

    /// Nodes of one chain (`family` is 'C+', 'C-' or 'C0').
    fn chain(&self, family_id: &str, id: usize) -> PyResult<Vec<PyCharNode>> {
        Ok(self.net.chain(family(family_id)?, id).into_iter().map(PyCharNode).collect())
    }

    fn pseudostructure_residual(&self, family_id: &str) -> PyResult<f64> {
        Ok(moc::pseudostructure_residual(&self.net, family(family_id)?, &self.gas))
    }
}

/// Advances the characteristic net from initial nodes until `t_end` or the
/// first envelope.
#[pyfunction]
fn advance_net(initial: Vec<PyCharNode>, t_end: f64, gas: &PyGasModel) -> PyResult<PyCharNet> {
    let nodes: Vec<moc::CharNode> = initial.into_iter().map(|n| n.0).collect();
    let net = moc::advance_net(&nodes, t_end, &gas.0).map_err(to_py)?;
    Ok(PyCharNet { net, gas: gas.0 })
}

/// Straight-characteristic envelope time `-1/min(dλ/dx0)`, or `None`.
#[pyfunction]
#[pyo3(signature = (x0, slopes, family_id="C+"))]
fn detect_envelope_analytic(x0: Vec<f64>, slopes: Vec<f64>, family_id: &str) -> PyResult<Option<PyEnvelopeEvent>> {
    Ok(moc::detect_envelope_analytic(&x0, &slopes, family(family_id)?)
        .map_err(to_py)?
        .map(Into::into))
}

#[pyclass(name = "JumpCheckReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyJumpCheckReport {
    relation: &'static str,
    lhs: f64,
    rhs: f64,
    rel_error: f64,
    passed: bool,
    grid_h: f64,
}

impl From<jumps::JumpCheckReport> for PyJumpCheckReport {
    fn from(r: jumps::JumpCheckReport) -> Self {
        Self {
            relation: match r.relation {
                jumps::Relation::ContactEq => "contact",
                jumps::Relation::CharEq => "char",
            },
            lhs: r.lhs,
            rhs: r.rhs,
            rel_error: r.rel_error,
            passed: r.passed,
            grid_h: r.grid_h,
        }
    }
}

#[pymethods]
impl PyJumpCheckReport {
    fn __repr__(&self) -> String {
        format!(
            "JumpCheckReport(relation={:?}, lhs={}, rhs={}, rel_error={}, passed={})",
            self.relation, self.lhs, self.rhs, self.rel_error, self.passed
        )
    }
}

/// Synthesizes a kink in `s(y)` across a horizontal particle path on an
/// `n`-cell grid and checks the contact jump relation there.
#[pyfunction]
#[pyo3(signature = (gas, delta, n, tol=jumps::CONTACT_TOLERANCE))]
fn contact_jump_check(gas: &PyGasModel, delta: f64, n: usize, tol: f64) -> PyResult<PyJumpCheckReport> {
    let m = &gas.0;
    let base = vortigen::PrimitiveState::new(1.0, [1.0, 0.0], 1.0);
    let grid = StructuredGrid2D::spanning(5, n + 1, (0.0, 4.0 / n as f64), (0.0, 1.0)).map_err(to_py)?;
    let (fs, y0) = jumps::synthesize_contact_field(&base, delta, grid, m).map_err(to_py)?;
    let surface = Surface::new(SurfaceKind::Trajectory, [0.0, 1.0]).map_err(to_py)?;
    let wd = jumps::measure_weak_discontinuity(&fs, surface, [grid.x(2), y0], m).map_err(to_py)?;
    let state = thermo::derive_state(&base, m).map_err(to_py)?;
    Ok(jumps::contact_jump_check(&wd, &state, m, tol).map_err(to_py)?.into())
}

/// `det(λI − A)/a³` of the 1-D system at slope `λ`.
#[pyfunction]
fn consistency_determinant(rho: f64, u: f64, p: f64, slope: f64, gas: &PyGasModel) -> PyResult<f64> {
    jumps::consistency_determinant(&vortigen::PrimitiveState::one_d(rho, u, p), slope, &gas.0).map_err(to_py)
}

/// Flow state on a uniform structured grid; arrays are row-major in `x`.
#[pyclass(name = "FieldSet", frozen)]
struct PyFieldSet(fields::FieldSet);

#[pymethods]
impl PyFieldSet {
    #[new]
    #[pyo3(signature = (nx, ny, x0, y0, hx, hy, rho, u, v, p))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        nx: usize,
        ny: usize,
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        rho: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        p: Vec<f64>,
    ) -> PyResult<Self> {
        let grid = StructuredGrid2D::new(nx, ny, x0, y0, hx, hy).map_err(to_py)?;
        fields::FieldSet::new(grid, rho, u, v, p).map(Self).map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.grid().nx, self.0.grid().ny)
    }

    /// Traces the streamline through `seed` and evaluates the commutator
    /// along it. Returns `max_k`, `tolerance`, `classification`, `dominant`
    /// and the `xi1`/`k` samples.
    #[pyo3(signature = (gas, seed, max_len, sign="consistent", transport=None, variant="paper", tolerance=None))]
    #[allow(clippy::too_many_arguments)]
    fn commutator_along<'py>(
        &self,
        py: Python<'py>,
        gas: &PyGasModel,
        seed: (f64, f64),
        max_len: f64,
        sign: &str,
        transport: Option<(f64, f64)>,
        variant: &str,
        tolerance: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let sign = match sign {
            "consistent" => CroccoSign::Consistent,
            "paper" => CroccoSign::PaperLiteral,
            other => return Err(PyValueError::new_err(format!("sign must be 'consistent' or 'paper', got {other:?}"))),
        };
        let variant = match variant {
            "paper" => ProductionVariant::PaperLiteral,
            "standard" => ProductionVariant::StandardProduction,
            other => return Err(PyValueError::new_err(format!("variant must be 'paper' or 'standard', got {other:?}"))),
        };
        let (fs, m) = (&self.0, &gas.0);
        let grid = fs.grid();
        let traj = fields::trace_streamline(fs, [seed.0, seed.1], None, max_len).map_err(to_py)?;
        let frame = fields::frame_along(&traj).map_err(to_py)?;
        let terms = crocco_normal_coefficient(fs, &traj, &frame, &ForceModel::None, m, sign, false).map_err(to_py)?;
        let fc = match transport {
            Some((mu, k)) => {
                let tm = TransportModel::new(mu, k).map_err(to_py)?;
                let energy = viscous_a1(fs, &tm, m, variant).map_err(to_py)?;
                FormCoefficients::viscous(&traj, grid, terms, energy, sign).map_err(to_py)?
            }
            None => FormCoefficients::inviscid(&traj, terms, sign),
        };
        let c = commutator(&fc, &traj, &frame, grid).map_err(to_py)?;
        let tol = match tolerance {
            Some(t) => t,
            None => default_equilibrium_tolerance(fs, m).map_err(to_py)?,
        };
        let out = PyDict::new(py);
        out.set_item("max_k", c.max_abs())?;
        out.set_item("tolerance", tol)?;
        match equilibrium_classifier(&c, tol).map_err(to_py)? {
            Equilibrium::LocallyEquilibrium => {
                out.set_item("classification", "locally_equilibrium")?;
                out.set_item("dominant", py.None())?;
            }
            Equilibrium::Nonequilibrium { dominant, .. } => {
                out.set_item("classification", "nonequilibrium")?;
                out.set_item("dominant", dominant.name())?;
            }
        }
        out.set_item("xi1", c.xi1.clone())?;
        out.set_item("k", c.k.clone())?;
        Ok(out)
    }
}

#[pymodule]
fn vortigen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGasModel>()?;
    m.add_class::<PyCharNode>()?;
    m.add_class::<PyCharNet>()?;
    m.add_class::<PyEnvelopeEvent>()?;
    m.add_class::<PyJumpCheckReport>()?;
    m.add_class::<PyFieldSet>()?;
    m.add_function(wrap_pyfunction!(derive_state, m)?)?;
    m.add_function(wrap_pyfunction!(advance_net, m)?)?;
    m.add_function(wrap_pyfunction!(detect_envelope_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(contact_jump_check, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_determinant, m)?)?;
    Ok(())
}
