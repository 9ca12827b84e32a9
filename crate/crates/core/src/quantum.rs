//! Finite-dimensional quantum backend: density operators, projectors, the
//! Born rule, the Lüders update, commutation compatibility, and the
//! projector lattice.
//!
//! Matrices are dense complex doubles with dimension capped at
//! [`MAX_DIM`]; the tolerances below absorb the rounding this entails.
//! Exactness lives on the classical side of the crate.

use crate::error::{Error, Result};
use crate::lang::{PropertyId, StateId};
use crate::qstruct::{OrthoLattice, StateProbabilityFamily};
use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const MAX_DIM: usize = 8;

/// Absolute tolerance for Hermiticity, idempotence, trace, additivity and
/// two-path consistency checks.
pub const FLOAT_TOL: f64 = 1e-9;

/// Absolute eigenvalue / residual tolerance for rank decisions (meets and
/// the range-inclusion order).
pub const RANK_TOL: f64 = 1e-8;

/// Branch probabilities at or below this are treated as zero.
pub const ZERO_BRANCH_TOL: f64 = 1e-12;

/// Largest entry modulus of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::DimensionMismatch { left: r, right: c });
    }
    if r == 0 || r > MAX_DIM {
        return Err(Error::DimTooLarge { dim: r, max: MAX_DIM });
    }
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NotADensityOperator("non-finite entries".into()));
    }
    Ok(r)
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix: (eigenvalues, orthonormal
/// eigenvector columns).
fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// A trace-one positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let defect = hermitian_defect(&matrix);
        if defect > FLOAT_TOL {
            return Err(Error::NotADensityOperator(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let (eigs, _) = hermitian_eigen(&matrix);
        let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -FLOAT_TOL {
            return Err(Error::NotADensityOperator(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > FLOAT_TOL {
            return Err(Error::NotADensityOperator(format!("trace {trace}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Pure state |v⟩⟨v| from a (not necessarily normalized) vector.
    pub fn pure(v: &DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm <= ZERO_BRANCH_TOL {
            return Err(Error::NotADensityOperator("zero state vector".into()));
        }
        let unit = v / C64::new(norm, 0.0);
        DensityOperator::new(&unit * unit.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim, max: MAX_DIM });
        }
        DensityOperator::new(CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// A Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
}

impl Projector {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let defect = hermitian_defect(&matrix);
        if defect > FLOAT_TOL {
            return Err(Error::NotAProjector(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let idem = max_abs(&(&matrix * &matrix - &matrix));
        if idem > FLOAT_TOL {
            return Err(Error::NotAProjector(format!(
                "idempotence defect {idem:.3e}"
            )));
        }
        Ok(Projector { matrix })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim, max: MAX_DIM });
        }
        Ok(Projector {
            matrix: CMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim, max: MAX_DIM });
        }
        Ok(Projector {
            matrix: CMatrix::identity(dim, dim),
        })
    }

    /// Rank-1 projector onto a vector.
    pub fn onto(v: &DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm <= ZERO_BRANCH_TOL {
            return Err(Error::NotAProjector("zero vector".into()));
        }
        let unit = v / C64::new(norm, 0.0);
        Projector::new(&unit * unit.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }
}

/// Born probability `Tr[ρP]`, clamped into [0,1] when within [`FLOAT_TOL`]
/// of a boundary. Defined without reference to any context.
pub fn born(rho: &DensityOperator, p: &Projector) -> Result<f64> {
    check_dims(rho.dim(), p.dim())?;
    let t = (rho.matrix() * p.matrix()).trace().re;
    Ok(clamp_unit(t))
}

fn clamp_unit(t: f64) -> f64 {
    if (-FLOAT_TOL..0.0).contains(&t) {
        0.0
    } else if t > 1.0 && t <= 1.0 + FLOAT_TOL {
        1.0
    } else {
        t
    }
}

/// Post-measurement state `PρP / Tr[ρP]`. The output is revalidated
/// against every density-operator invariant.
pub fn lueders(rho: &DensityOperator, p: &Projector) -> Result<DensityOperator> {
    check_dims(rho.dim(), p.dim())?;
    let weight = (rho.matrix() * p.matrix()).trace().re;
    if weight <= ZERO_BRANCH_TOL {
        return Err(Error::ZeroProbabilityBranch);
    }
    let updated = p.matrix() * rho.matrix() * p.matrix() / C64::new(weight, 0.0);
    DensityOperator::new(updated)
}

/// Range inclusion `P ≪ Q`, decided by the residual `‖QP − P‖`.
pub fn projector_leq(p: &Projector, q: &Projector) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    Ok(max_abs(&(q.matrix() * p.matrix() - p.matrix())) <= RANK_TOL)
}

/// Projector onto `range(P) ∩ range(Q)`: the null space of
/// `(I−P) + (I−Q)`, with eigenvalues below [`RANK_TOL`] counted as zero.
pub fn proj_meet(p: &Projector, q: &Projector) -> Result<Projector> {
    check_dims(p.dim(), q.dim())?;
    let n = p.dim();
    let ident = CMatrix::identity(n, n);
    let gap = (&ident - p.matrix()) + (&ident - q.matrix());
    let (eigs, vecs) = hermitian_eigen(&gap);
    let mut meet = CMatrix::zeros(n, n);
    for (k, lambda) in eigs.iter().enumerate() {
        if lambda.abs() <= RANK_TOL {
            let v = vecs.column(k);
            meet += v * v.adjoint();
        }
    }
    Projector::new(meet)
}

/// Orthocomplement `I − P`.
pub fn proj_ortho(p: &Projector) -> Result<Projector> {
    let n = p.dim();
    Projector::new(CMatrix::identity(n, n) - p.matrix())
}

/// Projector onto `range(P) + range(Q)`, via De Morgan from the meet.
pub fn proj_join(p: &Projector, q: &Projector) -> Result<Projector> {
    proj_ortho(&proj_meet(&proj_ortho(p)?, &proj_ortho(q)?)?)
}

/// Commutation compatibility `[P,Q] = 0` within [`FLOAT_TOL`].
pub fn kappa_compatible(p: &Projector, q: &Projector) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    Ok(max_abs(&(p.matrix() * q.matrix() - q.matrix() * p.matrix())) <= FLOAT_TOL)
}

/// Probability of `e` after a measurement of `f` on `rho`:
/// `Tr[P_E P_F ρ P_F P_E] / Tr[P_F ρ P_F]`.
pub fn quantum_conditional(
    rho: &DensityOperator,
    e: &Projector,
    f: &Projector,
) -> Result<f64> {
    Ok(quantum_conditional_paths(rho, e, f)?.0)
}

/// Both computation routes for the sequential conditional: the direct trace
/// formula and the Lüders-update-then-Born composition. They must agree
/// within [`FLOAT_TOL`]; callers that care assert it.
pub fn quantum_conditional_paths(
    rho: &DensityOperator,
    e: &Projector,
    f: &Projector,
) -> Result<(f64, f64)> {
    check_dims(rho.dim(), e.dim())?;
    check_dims(rho.dim(), f.dim())?;
    let denom = (f.matrix() * rho.matrix() * f.matrix()).trace().re;
    if denom <= ZERO_BRANCH_TOL {
        return Err(Error::ZeroProbabilityBranch);
    }
    let collapsed = e.matrix() * f.matrix() * rho.matrix() * f.matrix() * e.matrix();
    let by_trace = clamp_unit(collapsed.trace().re / denom);
    let by_update = born(&lueders(rho, f)?, e)?;
    Ok((by_trace, by_update))
}

/// States, properties and their operators at one shared dimension.
#[derive(Debug, Clone)]
pub struct QuantumModel {
    dim: usize,
    states: BTreeMap<StateId, DensityOperator>,
    properties: BTreeMap<PropertyId, Projector>,
}

impl QuantumModel {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim, max: MAX_DIM });
        }
        Ok(QuantumModel {
            dim,
            states: BTreeMap::new(),
            properties: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert_state(&mut self, id: impl Into<StateId>, rho: DensityOperator) -> Result<()> {
        check_dims(self.dim, rho.dim())?;
        self.states.insert(id.into(), rho);
        Ok(())
    }

    pub fn insert_property(&mut self, id: impl Into<PropertyId>, p: Projector) -> Result<()> {
        check_dims(self.dim, p.dim())?;
        self.properties.insert(id.into(), p);
        Ok(())
    }

    pub fn state(&self, id: &StateId) -> Result<&DensityOperator> {
        self.states
            .get(id)
            .ok_or_else(|| Error::UnknownState(id.clone()))
    }

    pub fn property(&self, id: &PropertyId) -> Result<&Projector> {
        self.properties
            .get(id)
            .ok_or_else(|| Error::UnknownProperty(id.clone()))
    }

    pub fn states(&self) -> impl Iterator<Item = (&StateId, &DensityOperator)> {
        self.states.iter()
    }

    pub fn properties(&self) -> impl Iterator<Item = (&PropertyId, &Projector)> {
        self.properties.iter()
    }

    /// Born values of every (state, property) pair as a probability family.
    pub fn born_family(&self) -> Result<StateProbabilityFamily<f64>> {
        let mut family = StateProbabilityFamily::new();
        for (s, rho) in &self.states {
            for (e, p) in &self.properties {
                family.insert(s.clone(), e.clone(), born(rho, p)?)?;
            }
        }
        Ok(family)
    }

    /// Builds the ortholattice of the registered projectors, requiring the
    /// set to be closed under meet, join and orthocomplement (within
    /// [`RANK_TOL`]).
    pub fn projector_lattice(&self) -> Result<OrthoLattice> {
        let names: Vec<PropertyId> = self.properties.keys().cloned().collect();
        let projs: Vec<&Projector> = self.properties.values().collect();
        let n = names.len();
        if n == 0 {
            return Err(Error::MalformedLattice("no properties registered".into()));
        }
        let find = |m: &Projector| -> Result<usize> {
            projs
                .iter()
                .position(|p| max_abs(&(p.matrix() - m.matrix())) <= RANK_TOL)
                .ok_or_else(|| {
                    Error::MalformedLattice(format!(
                        "a lattice operation leaves the registered projector set \
                         (rank-{} result missing)",
                        m.rank()
                    ))
                })
        };
        let mut leq = vec![vec![false; n]; n];
        let mut ortho = vec![0usize; n];
        for i in 0..n {
            ortho[i] = find(&proj_ortho(projs[i])?)?;
            for j in 0..n {
                leq[i][j] = projector_leq(projs[i], projs[j])?;
            }
        }
        // meets and joins are recomputed from the order by from_parts; the
        // closure requirement above guarantees they exist
        for i in 0..n {
            for j in 0..n {
                find(&proj_meet(projs[i], projs[j])?)?;
                find(&proj_join(projs[i], projs[j])?)?;
            }
        }
        OrthoLattice::from_parts(names, leq, ortho)
    }
}

/// One disagreement between the Born-induced order and range inclusion.
#[derive(Debug, Clone)]
pub struct OrderingCounterexample {
    pub p: PropertyId,
    pub q: PropertyId,
    /// Whether `p ≪ q` holds as projectors.
    pub projector_order: bool,
    /// Index into the sample of a state with `born(S,p) > born(S,q)`,
    /// when one exists.
    pub separating_state: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct OrderingReport {
    pub pairs_checked: usize,
    pub sample_size: usize,
    /// A sample this small cannot order properties; agreement may be a
    /// false positive.
    pub low_confidence: bool,
    pub counterexamples: Vec<OrderingCounterexample>,
}

impl OrderingReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Verifies on a state sample that the pointwise Born order coincides with
/// the projector order: for every ordered pair of registered properties,
/// `[∀S: born(S,P) ≤ born(S,Q)] ⟺ P ≪ Q`.
pub fn ordering_family_check(
    model: &QuantumModel,
    sample: &[DensityOperator],
) -> Result<OrderingReport> {
    let mut report = OrderingReport {
        sample_size: sample.len(),
        low_confidence: sample.len() < 2,
        ..OrderingReport::default()
    };
    let props: Vec<(&PropertyId, &Projector)> = model.properties().collect();
    for (pi, pp) in &props {
        for (qi, qp) in &props {
            if pi == qi {
                continue;
            }
            report.pairs_checked += 1;
            let by_projectors = projector_leq(pp, qp)?;
            let mut separating = None;
            for (k, s) in sample.iter().enumerate() {
                if born(s, pp)? > born(s, qp)? + FLOAT_TOL {
                    separating = Some(k);
                    break;
                }
            }
            let by_born = separating.is_none();
            if by_projectors != by_born {
                report.counterexamples.push(OrderingCounterexample {
                    p: (*pi).clone(),
                    q: (*qi).clone(),
                    projector_order: by_projectors,
                    separating_state: separating,
                });
            }
        }
    }
    Ok(report)
}

/// Default sample for [`ordering_family_check`]: every eigenvector pure
/// state of every registered projector, the maximally mixed state, and 32
/// seeded Haar-random pure states. Eigenvector states already decide the
/// order at these dimensions; the random states add slack.
pub fn default_state_sample(model: &QuantumModel, seed: u64) -> Result<Vec<DensityOperator>> {
    let mut sample = Vec::new();
    for (_, p) in model.properties() {
        let (_, vecs) = hermitian_eigen(p.matrix());
        for k in 0..vecs.ncols() {
            sample.push(DensityOperator::pure(&vecs.column(k).into_owned())?);
        }
    }
    sample.push(DensityOperator::maximally_mixed(model.dim())?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        sample.push(haar_random_pure(model.dim(), &mut rng)?);
    }
    Ok(sample)
}

/// Haar-random pure state: a normalized vector of standard complex
/// Gaussians.
pub fn haar_random_pure(dim: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let v = DVector::from_iterator(
        dim,
        (0..dim).map(|_| C64::new(standard_normal(rng), standard_normal(rng))),
    );
    DensityOperator::pure(&v)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box–Muller; 1-u keeps the log argument positive
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A random density operator: a Haar mixture `AA†/Tr[AA†]`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    });
    let pos = &a * a.adjoint();
    let trace = pos.trace().re;
    DensityOperator::new(pos / C64::new(trace, 0.0))
}

/// A random projector of random rank: the span of the first `k` columns of
/// a Haar-random unitary.
pub fn random_projector(dim: usize, rng: &mut impl Rng) -> Result<Projector> {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    });
    let q = a.qr().q();
    let rank = rng.random_range(1..dim.max(2));
    let mut p = CMatrix::zeros(dim, dim);
    for k in 0..rank.min(dim) {
        let v = q.column(k);
        p += v * v.adjoint();
    }
    Projector::new(p)
}

/// Derives first-kind transform maps from the Lüders update: for every
/// property `E` and state `S` with nonzero Born weight, the entry maps `S`
/// to the registered state matching `τ_E(ρ_S)`, when one exists.
pub fn lueders_transform_maps(
    model: &QuantumModel,
) -> Result<BTreeMap<PropertyId, BTreeMap<StateId, StateId>>> {
    let mut maps = BTreeMap::new();
    for (e, p) in model.properties() {
        let mut map = BTreeMap::new();
        for (s, rho) in model.states() {
            if born(rho, p)? <= ZERO_BRANCH_TOL {
                continue;
            }
            let updated = lueders(rho, p)?;
            let target = model
                .states()
                .find(|(_, r)| max_abs(&(r.matrix() - updated.matrix())) <= RANK_TOL)
                .map(|(t, _)| t.clone());
            if let Some(t) = target {
                map.insert(s.clone(), t);
            }
        }
        maps.insert(e.clone(), map);
    }
    Ok(maps)
}

// ---------------------------------------------------------------------------
// Text forms and presets
// ---------------------------------------------------------------------------

/// Parses one `"re,im"` entry.
pub fn parse_complex(text: &str) -> Result<C64> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Error::Scenario(format!("complex entry {text:?} is not \"re,im\"")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| Error::Scenario(format!("bad real part in {text:?}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| Error::Scenario(format!("bad imaginary part in {text:?}")))?;
    Ok(C64::new(re, im))
}

/// Parses a row-major matrix of `"re,im"` entries.
pub fn parse_matrix(rows: &[Vec<String>]) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Scenario("matrix rows must be square".into()));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(entry)?;
        }
    }
    Ok(m)
}

fn real_matrix2(entries: [f64; 4]) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(entries[0], 0.0),
            C64::new(entries[1], 0.0),
            C64::new(entries[2], 0.0),
            C64::new(entries[3], 0.0),
        ],
    )
}

/// The four basis-axis rank-1 qubit operators with exact dyadic entries, so
/// that Born values over them come out as exact floats (0, 0.5, 1).
fn qubit_axis_matrix(name: &str) -> Option<CMatrix> {
    match name {
        "z+" => Some(real_matrix2([1.0, 0.0, 0.0, 0.0])),
        "z-" => Some(real_matrix2([0.0, 0.0, 0.0, 1.0])),
        "x+" => Some(real_matrix2([0.5, 0.5, 0.5, 0.5])),
        "x-" => Some(real_matrix2([0.5, -0.5, -0.5, 0.5])),
        _ => None,
    }
}

/// Named state presets: `z+`, `z-`, `x+`, `x-` (qubit pure states) and
/// `maximally-mixed` (any dimension).
pub fn preset_density(name: &str, dim: usize) -> Result<DensityOperator> {
    if name == "maximally-mixed" {
        return DensityOperator::maximally_mixed(dim);
    }
    let m = qubit_axis_matrix(name)
        .ok_or_else(|| Error::Scenario(format!("unknown state preset {name:?}")))?;
    if dim != 2 {
        return Err(Error::Scenario(format!(
            "state preset {name:?} requires dimension 2, fixture has {dim}"
        )));
    }
    DensityOperator::new(m)
}

/// Named projector presets: `z+`, `z-`, `x+`, `x-` (qubit rank-1), `zero`
/// and `identity` (any dimension), and `bloch:<x>,<y>,<z>` for a rank-1
/// qubit projector along a unit Bloch vector.
pub fn preset_projector(name: &str, dim: usize) -> Result<Projector> {
    match name {
        "zero" => return Projector::zero(dim),
        "identity" => return Projector::identity(dim),
        _ => {}
    }
    if let Some(coords) = name.strip_prefix("bloch:") {
        if dim != 2 {
            return Err(Error::Scenario(
                "bloch presets require dimension 2".into(),
            ));
        }
        let parts: Vec<f64> = coords
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Scenario(format!("bad bloch vector {coords:?}")))?;
        if parts.len() != 3 {
            return Err(Error::Scenario("bloch vector needs three coordinates".into()));
        }
        let norm = (parts[0].powi(2) + parts[1].powi(2) + parts[2].powi(2)).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Scenario(format!(
                "bloch vector has norm {norm}, expected 1"
            )));
        }
        let (x, y, z) = (parts[0], parts[1], parts[2]);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + z) / 2.0, 0.0),
                C64::new(x / 2.0, -y / 2.0),
                C64::new(x / 2.0, y / 2.0),
                C64::new((1.0 - z) / 2.0, 0.0),
            ],
        );
        return Projector::new(m);
    }
    let m = qubit_axis_matrix(name)
        .ok_or_else(|| Error::Scenario(format!("unknown projector preset {name:?}")))?;
    if dim != 2 {
        return Err(Error::Scenario(format!(
            "projector preset {name:?} requires dimension 2, fixture has {dim}"
        )));
    }
    Projector::new(m)
}

/// The standard qubit fixture: states z+, z-, x+ and properties
/// zero, identity, z+, z-, x+, x-. Its projector set is closed under the
/// lattice operations.
pub fn qubit_fixture() -> Result<QuantumModel> {
    let mut model = QuantumModel::new(2)?;
    for s in ["z+", "z-", "x+"] {
        model.insert_state(s, preset_density(s, 2)?)?;
    }
    model.insert_property("0", Projector::zero(2)?)?;
    model.insert_property("I", Projector::identity(2)?)?;
    for e in ["z+", "z-", "x+", "x-"] {
        model.insert_property(e, preset_projector(e, 2)?)?;
    }
    Ok(model)
}
