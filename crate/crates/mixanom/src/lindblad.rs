//! Lindbladian models: assembly, symmetry checks, numeric steady states per
//! symmetry sector, exact symbolic application, and relaxation gaps.
//!
//! Jump operators are stored as (operator, rate) pairs with l = sqrt(rate) op,
//! so dissipators stay in the rational ring for any rational rate. The
//! vectorization uses the column-stacking convention vec(A rho B) =
//! (B^T (x) A) vec(rho); with that convention the dissipator of l reads
//! conj(l) (x) l - (I (x) l'l + (l'l)^T (x) I) / 2.

use crate::anomaly::GroupSpec;
use crate::lattice::Lattice;
use crate::linalg::{self, CMat, Csr};
use crate::pauli::{FloatOperatorSum, OperatorSum, PauliWord};
use crate::phasepoly::PhasePolyUnitary;
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;

/// Eigenvalues with |lambda| below this are steady-state candidates.
pub const NULL_TOL: f64 = 1e-10;
/// The smallest dropped |lambda| must exceed the largest kept one by this
/// factor, or the degeneracy count is reported as ambiguous.
pub const DEGENERACY_MARGIN: f64 = 100.0;
/// Positivity slack for reconstructed density matrices.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// A jump operator l = sqrt(rate) * op.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub op: OperatorSum,
    pub rate: BigRational,
}

impl JumpOperator {
    pub fn unit(op: OperatorSum) -> Self {
        JumpOperator { op, rate: BigRational::one() }
    }

    pub fn with_rate(op: OperatorSum, rate: BigRational) -> Self {
        JumpOperator { op, rate }
    }
}

/// Lindbladian model over a lattice with a declared symmetry group.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub name: String,
    pub lattice: Lattice,
    pub hamiltonian: OperatorSum,
    pub jumps: Vec<JumpOperator>,
    pub symmetry: Option<GroupSpec>,
    /// conserved charge generating a continuous strong symmetry, when one
    /// exists (enters sector construction and the symmetry report)
    pub charge: Option<OperatorSum>,
    pub interaction_radius: usize,
}

impl LindbladModel {
    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    /// Hermiticity of H and the declared interaction radius of every term.
    pub fn validate(&self) -> Result<()> {
        if !self.hamiltonian.is_hermitian() {
            return Err(Error::InvalidModel("Hamiltonian is not Hermitian".into()));
        }
        for (w, _) in self.hamiltonian.terms() {
            if self.lattice.span(w.support()) > self.interaction_radius {
                return Err(Error::InvalidModel(format!(
                    "Hamiltonian term {w} exceeds interaction radius {}",
                    self.interaction_radius
                )));
            }
        }
        for j in &self.jumps {
            for (w, _) in j.op.terms() {
                if self.lattice.span(w.support()) > self.interaction_radius {
                    return Err(Error::InvalidModel(format!(
                        "jump term {w} exceeds interaction radius {}",
                        self.interaction_radius
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact L[rho] = -i[H, rho] + sum_mu rate (op rho op' - {op'op, rho}/2).
    pub fn apply_symbolic(&self, rho: &OperatorSum) -> Result<OperatorSum> {
        let minus_i = -Scalar::i();
        let mut acc = self.hamiltonian.commutator(rho, false)?.scale(&minus_i);
        for jump in &self.jumps {
            let rate = Scalar::from_parts(jump.rate.clone(), BigRational::zero());
            let half_rate = Scalar::from_parts(
                jump.rate.clone() / BigRational::from_integer(2.into()),
                BigRational::zero(),
            );
            let op_dag = jump.op.dagger();
            let sandwich = jump.op.mul(rho)?.mul(&op_dag)?;
            let opdag_op = op_dag.mul(&jump.op)?;
            let anti = opdag_op.commutator(rho, true)?;
            acc = acc.add(&sandwich.scale(&rate))?.sub(&anti.scale(&half_rate))?;
        }
        Ok(acc)
    }
}

/// Basis of a strong-symmetry eigenspace: each vector is a short combination
/// of computational configurations.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n_sites: usize,
    /// vectors as (config, amplitude) lists
    pub vectors: Vec<Vec<(u64, Complex64)>>,
    /// config -> (vector index, conjugated amplitude) for projections
    lookup: HashMap<u64, Vec<(usize, Complex64)>>,
}

impl SectorBasis {
    fn new(n_sites: usize, vectors: Vec<Vec<(u64, Complex64)>>) -> SectorBasis {
        let mut lookup: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
        for (idx, v) in vectors.iter().enumerate() {
            for &(cfg, amp) in v {
                lookup.entry(cfg).or_default().push((idx, amp.conj()));
            }
        }
        SectorBasis { n_sites, vectors, lookup }
    }

    /// Full computational basis.
    pub fn full(n_sites: usize) -> SectorBasis {
        let dim = 1u64 << n_sites;
        SectorBasis::new(n_sites, (0..dim).map(|cfg| vec![(cfg, Complex64::ONE)]).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Strong-symmetry sector specification.
#[derive(Debug, Clone)]
pub enum SectorSpec {
    /// Z-diagonal Hermitian charge with a rational eigenvalue.
    Charge { op: OperatorSum, value: BigRational },
    /// Diagonal unitary with eigenvalue exp(2 pi i k / 2^m).
    DiagonalUnitary { u: PhasePolyUnitary, exponent: u8 },
    /// Global spin-flip layer with eigenvalue +/-1.
    Flip { mask: u64, sign: i8 },
}

impl SectorSpec {
    pub fn label(&self) -> String {
        match self {
            SectorSpec::Charge { value, .. } => format!("q={value}"),
            SectorSpec::DiagonalUnitary { exponent, u } => {
                format!("phase=2pi*{}/{}", exponent, 1u16 << u.modulus_log2())
            }
            SectorSpec::Flip { sign, .. } => {
                format!("flip={}", if *sign > 0 { "+1" } else { "-1" })
            }
        }
    }

    /// Builds the eigenspace basis.
    pub fn basis(&self, n_sites: usize) -> Result<SectorBasis> {
        match self {
            SectorSpec::Charge { op, value } => {
                let mut vectors = Vec::new();
                for cfg in 0..(1u64 << n_sites) {
                    let v = op.diagonal_value(cfg);
                    if v.is_real() && &v.re == value {
                        vectors.push(vec![(cfg, Complex64::ONE)]);
                    }
                }
                if vectors.is_empty() {
                    return Err(Error::InvalidSector(format!("empty sector q={value}")));
                }
                Ok(SectorBasis::new(n_sites, vectors))
            }
            SectorSpec::DiagonalUnitary { u, exponent } => {
                if u.x_layer() != 0 {
                    return Err(Error::InvalidSector(
                        "diagonal-unitary sector generator has flips".into(),
                    ));
                }
                let mut vectors = Vec::new();
                for cfg in 0..(1u64 << n_sites) {
                    if u.eval_diagonal(cfg) == *exponent {
                        vectors.push(vec![(cfg, Complex64::ONE)]);
                    }
                }
                if vectors.is_empty() {
                    return Err(Error::InvalidSector(format!(
                        "empty sector for exponent {exponent}"
                    )));
                }
                Ok(SectorBasis::new(n_sites, vectors))
            }
            SectorSpec::Flip { mask, sign } => {
                if *mask == 0 || (n_sites < 64 && mask >> n_sites != 0) {
                    return Err(Error::InvalidSector("bad flip mask".into()));
                }
                let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let s = if *sign >= 0 { 1.0 } else { -1.0 };
                let mut vectors = Vec::new();
                for cfg in 0..(1u64 << n_sites) {
                    let partner = cfg ^ mask;
                    if cfg < partner {
                        vectors.push(vec![(cfg, amp), (partner, s * amp)]);
                    }
                }
                Ok(SectorBasis::new(n_sites, vectors))
            }
        }
    }

    /// Verifies the generator commutes with the Lindbladian action: exact
    /// commutation with H and with every jump operator.
    pub fn validate(&self, model: &LindbladModel) -> Result<()> {
        let n = model.n_sites();
        let check_op = |gen: &OperatorSum| -> Result<()> {
            if !gen.commutator(&model.hamiltonian, false)?.is_zero() {
                return Err(Error::InvalidSector("generator does not commute with H".into()));
            }
            for j in &model.jumps {
                if !gen.commutator(&j.op, false)?.is_zero() {
                    return Err(Error::InvalidSector(
                        "generator does not commute with a jump".into(),
                    ));
                }
            }
            Ok(())
        };
        match self {
            SectorSpec::Charge { op, .. } => check_op(op),
            SectorSpec::DiagonalUnitary { u, .. } => check_op(&u.to_operator_sum(n)?),
            SectorSpec::Flip { mask, .. } => check_op(&OperatorSum::from_word(
                n,
                PauliWord { x: *mask, z: 0 },
                Scalar::one(),
            )),
        }
    }
}

/// Applies an operator sum to a sparse state vector over configurations.
fn apply_to_state(op: &OperatorSum, state: &[(u64, Complex64)]) -> HashMap<u64, Complex64> {
    let mut out: HashMap<u64, Complex64> = HashMap::new();
    for (w, c) in op.terms() {
        let phase = Complex64::i().powu((w.x & w.z).count_ones() % 4) * c.to_complex64();
        for &(cfg, amp) in state {
            let sign = if ((w.z & cfg).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            *out.entry(cfg ^ w.x).or_insert(Complex64::ZERO) += phase * sign * amp;
        }
    }
    out
}

/// Projects a config-space vector onto the sector basis; errors if weight
/// leaks outside the sector.
fn project_to_basis(
    basis: &SectorBasis,
    psi: &HashMap<u64, Complex64>,
) -> Result<Vec<(usize, Complex64)>> {
    let mut coeffs: HashMap<usize, Complex64> = HashMap::new();
    let mut norm2 = 0.0;
    for (&cfg, &amp) in psi {
        norm2 += amp.norm_sqr();
        if amp.norm_sqr() < 1e-28 {
            continue;
        }
        match basis.lookup.get(&cfg) {
            Some(owners) => {
                for &(idx, conj_amp) in owners {
                    *coeffs.entry(idx).or_insert(Complex64::ZERO) += conj_amp * amp;
                }
            }
            None => {
                return Err(Error::InvalidSector(format!(
                    "operator leaks out of the sector at config {cfg:b}"
                )));
            }
        }
    }
    // leakage check: reconstruct and compare
    let mut recon: HashMap<u64, Complex64> = HashMap::new();
    for (&idx, &c) in &coeffs {
        for &(cfg, amp) in &basis.vectors[idx] {
            *recon.entry(cfg).or_insert(Complex64::ZERO) += amp * c;
        }
    }
    let mut err2 = 0.0;
    for (&cfg, &amp) in psi {
        let r = recon.get(&cfg).copied().unwrap_or(Complex64::ZERO);
        err2 += (amp - r).norm_sqr();
    }
    if norm2 > 1e-24 && err2 > 1e-18 * norm2.max(1.0) {
        return Err(Error::InvalidSector("operator leaks out of the sector".into()));
    }
    Ok(coeffs.into_iter().collect())
}

/// (A, B, weight) triples defining L[rho] = sum weight * A rho B.
fn lindblad_pairs(model: &LindbladModel) -> Result<Vec<(OperatorSum, OperatorSum, Complex64)>> {
    let n = model.n_sites();
    let id = OperatorSum::identity(n);
    let mut pairs = Vec::new();
    let h = &model.hamiltonian;
    if !h.is_zero() {
        pairs.push((h.clone(), id.clone(), -Complex64::i()));
        pairs.push((id.clone(), h.clone(), Complex64::i()));
    }
    for j in &model.jumps {
        let rate = j
            .rate
            .to_f64()
            .ok_or_else(|| Error::Numerics("jump rate does not fit in f64".into()))?;
        let op_dag = j.op.dagger();
        let opdag_op = op_dag.mul(&j.op)?;
        pairs.push((j.op.clone(), op_dag, Complex64::new(rate, 0.0)));
        pairs.push((opdag_op.clone(), id.clone(), Complex64::new(-rate / 2.0, 0.0)));
        pairs.push((id.clone(), opdag_op, Complex64::new(-rate / 2.0, 0.0)));
    }
    Ok(pairs)
}

/// Sparse superoperator block acting on operators |v_a><w_b| with kets from
/// `ket` and bras from `bra`. Column-stacking: index = b * ket.dim() + a.
pub fn superoperator_block(
    model: &LindbladModel,
    ket: &SectorBasis,
    bra: &SectorBasis,
) -> Result<Csr> {
    let pairs = lindblad_pairs(model)?;
    let dk = ket.dim();
    let db = bra.dim();
    let dim = dk * db;
    let mut triplets = Vec::new();
    for (a_op, b_op, weight) in &pairs {
        let b_dag = b_op.dagger();
        let mut alphas: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(dk);
        for a in 0..dk {
            let psi = apply_to_state(a_op, &ket.vectors[a]);
            alphas.push(project_to_basis(ket, &psi)?);
        }
        let mut betas: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(db);
        for b in 0..db {
            let psi = apply_to_state(&b_dag, &bra.vectors[b]);
            betas.push(project_to_basis(bra, &psi)?);
        }
        for b in 0..db {
            for a in 0..dk {
                let col = b * dk + a;
                for &(bp, beta) in &betas[b] {
                    for &(ap, alpha) in &alphas[a] {
                        let val = *weight * alpha * beta.conj();
                        if val.norm_sqr() > 0.0 {
                            triplets.push((bp * dk + ap, col, val));
                        }
                    }
                }
            }
        }
    }
    Ok(Csr::from_triplets(dim, triplets))
}

/// Full vectorized Lindbladian on the computational pair basis.
/// Site count is capped (the matrix has 4^n rows).
pub fn vectorize(model: &LindbladModel) -> Result<Csr> {
    let n = model.n_sites();
    if n > 10 {
        return Err(Error::CapExceeded(n, 10));
    }
    let full = SectorBasis::full(n);
    superoperator_block(model, &full, &full)
}

/// Serialized model: site count, boundary flag, Hamiltonian and jump terms,
/// and the symmetry-group document.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModelJson {
    pub name: String,
    pub n_sites: usize,
    pub lattice: crate::lattice::LatticeKind,
    pub boundary: crate::lattice::Boundary,
    pub interaction_radius: usize,
    pub hamiltonian: crate::pauli::OperatorSumJson,
    pub jumps: Vec<JumpJson>,
    pub symmetry: Option<crate::anomaly::GroupSpecJson>,
    pub charge: Option<crate::pauli::OperatorSumJson>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct JumpJson {
    pub op: crate::pauli::OperatorSumJson,
    pub rate: String,
}

impl LindbladModel {
    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            name: self.name.clone(),
            n_sites: self.n_sites(),
            lattice: self.lattice.kind,
            boundary: self.lattice.boundary,
            interaction_radius: self.interaction_radius,
            hamiltonian: self.hamiltonian.to_json(),
            jumps: self
                .jumps
                .iter()
                .map(|j| JumpJson { op: j.op.to_json(), rate: j.rate.to_string() })
                .collect(),
            symmetry: self.symmetry.as_ref().map(|g| g.to_json()),
            charge: self.charge.as_ref().map(|q| q.to_json()),
        }
    }
}

/// Per-element outcome of the symmetry check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SymmetryReport {
    pub charge_conserved: Option<bool>,
    pub elements: Vec<ElementReport>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ElementReport {
    pub label: String,
    pub strong: bool,
    pub pass: bool,
    pub detail: String,
}

/// Checks the declared symmetries: strong elements must commute exactly with
/// H and every jump; weak elements must map the jump set to itself up to
/// phases and permutation (with a dense superoperator-commutation fallback on
/// small systems when the set test fails).
pub fn check_symmetry(model: &LindbladModel) -> Result<SymmetryReport> {
    let n = model.n_sites();
    let charge_conserved = match &model.charge {
        Some(q) => {
            let mut ok = q.commutator(&model.hamiltonian, false)?.is_zero();
            for j in &model.jumps {
                ok &= q.commutator(&j.op, false)?.is_zero();
            }
            Some(ok)
        }
        None => None,
    };
    let mut elements = Vec::new();
    if let Some(group) = &model.symmetry {
        for gamma in 0..group.order() {
            if gamma == group.identity_index() {
                continue;
            }
            let label = group.labels()[gamma].clone();
            let strong = group.strong_indices().contains(&gamma);
            let u = &group.rep(gamma).left;
            let h_ok = u.conjugate_sum(&model.hamiltonian)? == model.hamiltonian;
            let (jumps_ok, detail) = if strong {
                let mut ok = true;
                for j in &model.jumps {
                    if u.conjugate_sum(&j.op)? != j.op {
                        ok = false;
                        break;
                    }
                }
                (ok, "exact commutation".to_string())
            } else if weak_jump_set_check(model, u)? {
                (true, "jump set invariant up to phase".to_string())
            } else if n <= 6 {
                let ok = dense_superop_commutes(model, group, gamma)?;
                (ok, "dense superoperator commutation".to_string())
            } else {
                (false, "jump set test failed; system too large for dense fallback".to_string())
            };
            elements.push(ElementReport {
                label,
                strong,
                pass: h_ok && jumps_ok,
                detail: if h_ok { detail } else { "H not invariant".to_string() },
            });
        }
    }
    let all_pass = elements.iter().all(|e| e.pass) && charge_conserved.unwrap_or(true);
    Ok(SymmetryReport { charge_conserved, elements, all_pass })
}

/// Does U map the set {sqrt(r_mu) l_mu} to itself up to unit phases and a
/// permutation?
fn weak_jump_set_check(model: &LindbladModel, u: &PhasePolyUnitary) -> Result<bool> {
    let mut used = vec![false; model.jumps.len()];
    for j in &model.jumps {
        let conj = u.conjugate_sum(&j.op)?;
        let mut matched = false;
        for (idx, other) in model.jumps.iter().enumerate() {
            if used[idx] || other.rate != j.rate {
                continue;
            }
            if let Some(phase) = proportionality_phase(&conj, &other.op) {
                if phase.norm_sqr().is_one() {
                    used[idx] = true;
                    matched = true;
                    break;
                }
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// If a = c * b for a single scalar c, returns c.
fn proportionality_phase(a: &OperatorSum, b: &OperatorSum) -> Option<Scalar> {
    if a.num_terms() != b.num_terms() {
        return None;
    }
    let mut ratio: Option<Scalar> = None;
    for (w, cb) in b.terms() {
        let ca = a.coeff(w);
        if ca.is_zero() {
            return None;
        }
        let denom = cb.norm_sqr();
        let prod = &ca * &cb.conj();
        let r = Scalar::from_parts(prod.re / denom.clone(), prod.im / denom);
        match &ratio {
            None => ratio = Some(r),
            Some(r0) if *r0 == r => {}
            _ => return None,
        }
    }
    ratio
}

fn dense_superop_commutes(model: &LindbladModel, group: &GroupSpec, gamma: usize) -> Result<bool> {
    let n = model.n_sites();
    let lhat = vectorize(model)?.to_dense();
    let dim = 1usize << n;
    let left = group.rep(gamma).left.to_operator_sum(n)?.to_dense()?;
    let right = group.rep(gamma).right.to_operator_sum(n)?.to_dense()?;
    // superoperator of rho -> U_left rho U_right^dag = conj(U_right) (x) U_left
    let mut u_super = CMat::zeros(dim * dim, dim * dim);
    for bp in 0..dim {
        for b in 0..dim {
            let rb = right[(b, bp)].conj();
            if rb.norm_sqr() == 0.0 {
                continue;
            }
            for ap in 0..dim {
                for a in 0..dim {
                    let v = rb * left[(ap, a)];
                    if v.norm_sqr() > 0.0 {
                        u_super[(bp * dim + ap, b * dim + a)] = v;
                    }
                }
            }
        }
    }
    let diff = lhat.matmul(&u_super).sub(&u_super.matmul(&lhat));
    Ok(diff.max_abs() < 1e-10)
}

/// Result of a sector steady-state solve.
#[derive(Debug)]
pub struct SteadyStateResult {
    pub degeneracy: usize,
    /// positive, trace-one representatives as Pauli decompositions
    pub states: Vec<FloatOperatorSum>,
    /// the same states as dense matrices on the full Hilbert space
    pub dense_states: Vec<CMat>,
    /// orthonormalized full-space vectorizations of the null basis
    pub null_basis: CMat,
    pub gap: f64,
}

/// Largest sector superoperator dimension that is solved densely.
const DENSE_SUPEROP_LIMIT: usize = 4200;

/// Finds the steady states of the (sector-restricted) Lindbladian: null-space
/// extraction with a degeneracy margin, followed by rotation of the null
/// basis into positive trace-normalized density matrices.
pub fn steady_states(
    model: &LindbladModel,
    sector: Option<&SectorSpec>,
) -> Result<SteadyStateResult> {
    let n = model.n_sites();
    let basis = match sector {
        Some(s) => {
            s.validate(model)?;
            s.basis(n)?
        }
        None => SectorBasis::full(n),
    };
    let d = basis.dim();
    let dim = d * d;
    if dim > DENSE_SUPEROP_LIMIT {
        return Err(Error::CapExceeded(dim, DENSE_SUPEROP_LIMIT));
    }
    let lhat = superoperator_block(model, &basis, &basis)?.to_dense();
    let (evals, evecs) = linalg::eig_general(&lhat)?;
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&i, &j| evals[i].norm().partial_cmp(&evals[j].norm()).unwrap());
    let null_idx: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&i| evals[i].norm() < NULL_TOL)
        .collect();
    if null_idx.is_empty() {
        return Err(Error::NoSteadyState);
    }
    let kept = evals[*null_idx.last().unwrap()].norm();
    if let Some(&first_dropped) = order.get(null_idx.len()) {
        let dropped = evals[first_dropped].norm();
        if dropped < DEGENERACY_MARGIN * kept.max(1e-300) && dropped < 1e-6 {
            return Err(Error::DegeneracyAmbiguous { kept, dropped });
        }
    }
    let degeneracy = null_idx.len();
    let gap = evals
        .iter()
        .filter(|l| l.norm() >= NULL_TOL)
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min);
    let gap = if gap.is_finite() { gap.max(0.0) } else { 0.0 };

    // polish the null vectors by shifted inverse iteration: the null
    // eigenvalue is separated from the rest of the spectrum by the margin
    // check above, so two solves push the vectors to machine precision
    let refined: Vec<Vec<Complex64>> = {
        use faer::linalg::solvers::Solve;
        let eps = Complex64::new(1e-8, 0.0);
        let mut shifted = lhat.to_faer();
        for i in 0..dim {
            shifted[(i, i)] -= eps;
        }
        let lu = shifted.full_piv_lu();
        null_idx
            .iter()
            .map(|&idx| {
                let mut v: Vec<Complex64> = (0..dim).map(|r| evecs[(r, idx)]).collect();
                for _ in 0..2 {
                    let rhs = faer::Mat::from_fn(dim, 1, |i, _| v[i]);
                    let sol = lu.solve(&rhs);
                    let norm = (0..dim).map(|i| sol[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
                    for i in 0..dim {
                        v[i] = sol[(i, 0)] / norm;
                    }
                }
                v
            })
            .collect()
    };

    // Hermitian null-space basis in the sector pair space
    let unvec = |v: &[Complex64]| -> CMat { CMat::unvec(v, d) };
    let mut herm_basis: Vec<CMat> = Vec::new();
    for col in &refined {
        let mat = unvec(col);
        for cand in [mat.add_dagger(), mat.skew_dagger()] {
            if cand.max_abs() < 1e-12 {
                continue;
            }
            let mut v = cand;
            for q in &herm_basis {
                let ip = hs_inner(q, &v);
                v = v.sub(&q.scale(ip));
            }
            let norm = hs_norm(&v);
            if norm > 1e-9 {
                herm_basis.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
            }
            if herm_basis.len() == degeneracy {
                break;
            }
        }
        if herm_basis.len() == degeneracy {
            break;
        }
    }
    if herm_basis.len() != degeneracy {
        return Err(Error::Numerics(format!(
            "hermitian null basis incomplete: {} of {degeneracy}",
            herm_basis.len()
        )));
    }

    // the steady projection of the sector identity is a positive base state
    let ident_vec = CMat::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)).vec();
    let base = unvec(&linalg::spectral_project(&evecs, &null_idx, &ident_vec));
    let base = base.add_dagger().scale(Complex64::new(0.5, 0.0));

    // split the base state into extremal positive states along the null basis
    let mut states = vec![normalize_trace(&base)?];
    for h in &herm_basis {
        let mut next = Vec::new();
        for s in states.iter() {
            match split_state(s, h, &evecs, &null_idx, d) {
                Some(parts) => next.extend(parts),
                None => next.push(s.clone()),
            }
        }
        states = next;
        if states.len() >= degeneracy {
            break;
        }
    }

    // verify positivity and embed into the full space
    let mut dense_states = Vec::new();
    let mut float_states = Vec::new();
    for s in &states {
        let (ev, _) = linalg::eig_hermitian(s)?;
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < POSITIVITY_TOL {
            return Err(Error::PositivityFailure(min));
        }
        let full = embed_full(s, &basis);
        float_states.push(FloatOperatorSum::from_dense(&full, n, 1e-12));
        dense_states.push(full);
    }

    // orthonormalized full-space null basis for span comparisons
    let full_dim = 1usize << n;
    let mut null_mat = CMat::zeros(full_dim * full_dim, herm_basis.len());
    for (j, h) in herm_basis.iter().enumerate() {
        let v = embed_full(h, &basis).vec();
        for (i, z) in v.iter().enumerate() {
            null_mat[(i, j)] = *z;
        }
    }
    let null_basis = linalg::orthonormal_columns(&null_mat, 1e-9);

    Ok(SteadyStateResult { degeneracy, states: float_states, dense_states, null_basis, gap })
}

fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (x, y) in a.data.iter().zip(b.data.iter()) {
        acc += x.conj() * y;
    }
    acc
}

fn hs_norm(a: &CMat) -> f64 {
    hs_inner(a, a).re.sqrt()
}

fn normalize_trace(m: &CMat) -> Result<CMat> {
    let tr = m.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::Numerics("traceless steady candidate".into()));
    }
    Ok(m.scale(Complex64::ONE / tr))
}

/// Splits a positive steady state along the spectral projectors of a
/// Hermitian null direction, re-projecting the parts onto the null space.
fn split_state(
    s: &CMat,
    h: &CMat,
    evecs: &CMat,
    null_idx: &[usize],
    d: usize,
) -> Option<Vec<CMat>> {
    let (ev, u) = linalg::eig_hermitian(h).ok()?;
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in ev.iter().enumerate() {
        match clusters.last_mut() {
            Some((rep, idxs)) if (v - *rep).abs() < 1e-7 => idxs.push(i),
            _ => clusters.push((v, vec![i])),
        }
    }
    if clusters.len() < 2 {
        return None;
    }
    let mut parts = Vec::new();
    for (_, idxs) in &clusters {
        let mut p = CMat::zeros(d, d);
        for &i in idxs {
            for r in 0..d {
                for c in 0..d {
                    p[(r, c)] += u[(r, i)] * u[(c, i)].conj();
                }
            }
        }
        let cand = p.matmul(s).matmul(&p);
        if cand.trace().norm() < 1e-9 {
            continue;
        }
        // keep only candidates that stay on the steady manifold
        let projected = linalg::spectral_project(evecs, null_idx, &cand.vec());
        let back = CMat::unvec(&projected, d).add_dagger().scale(Complex64::new(0.5, 0.0));
        if back.sub(&cand).max_abs() > 1e-7 * cand.max_abs().max(1e-30) {
            return None;
        }
        parts.push(normalize_trace(&back).ok()?);
    }
    if parts.len() >= 2 {
        Some(parts)
    } else {
        None
    }
}

/// Embeds a sector-basis operator into the full Hilbert space.
fn embed_full(s: &CMat, basis: &SectorBasis) -> CMat {
    let dim = 1usize << basis.n_sites;
    let mut out = CMat::zeros(dim, dim);
    for a in 0..basis.dim() {
        for b in 0..basis.dim() {
            let v = s[(a, b)];
            if v.norm_sqr() < 1e-30 {
                continue;
            }
            for &(ca, aa) in &basis.vectors[a] {
                for &(cb, ab) in &basis.vectors[b] {
                    out[(ca as usize, cb as usize)] += v * aa * ab.conj();
                }
            }
        }
    }
    out
}

impl CMat {
    fn add_dagger(&self) -> CMat {
        let mut out = self.clone();
        let dag = self.dagger();
        for (a, b) in out.data.iter_mut().zip(dag.data.iter()) {
            *a += *b;
        }
        out
    }

    fn skew_dagger(&self) -> CMat {
        let dag = self.dagger();
        let mut out = self.sub(&dag);
        for a in out.data.iter_mut() {
            *a *= Complex64::new(0.0, -1.0);
        }
        out
    }
}

/// Relaxation gap of the (sector-restricted) Lindbladian: the smallest
/// -Re(lambda) over nonzero eigenvalues. Uses the dense spectrum when the
/// superoperator fits, otherwise a propagator-filtered Arnoldi iteration.
pub fn spectral_gap(model: &LindbladModel, sector: Option<&SectorSpec>) -> Result<f64> {
    let n = model.n_sites();
    let basis = match sector {
        Some(s) => {
            s.validate(model)?;
            s.basis(n)?
        }
        None => SectorBasis::full(n),
    };
    let dim = basis.dim() * basis.dim();
    let block = superoperator_block(model, &basis, &basis)?;
    if dim <= DENSE_SUPEROP_LIMIT {
        let (evals, _) = linalg::eig_general(&block.to_dense())?;
        let gap = evals
            .iter()
            .filter(|l| l.norm() >= NULL_TOL)
            .map(|l| -l.re)
            .fold(f64::INFINITY, f64::min);
        return Ok(if gap.is_finite() { gap.max(0.0) } else { 0.0 });
    }
    // sparse path: merge several filtered Krylov runs
    let mut best = f64::INFINITY;
    for seed in [3u64, 17, 41] {
        let ritz = linalg::filtered_arnoldi_spectrum(&block, 140, 24, seed);
        for (theta, res) in ritz {
            if res < 1e-8 && theta.norm() >= 1e-8 && -theta.re < best {
                best = -theta.re;
            }
        }
    }
    if best.is_finite() {
        Ok(best.max(0.0))
    } else {
        Err(Error::Numerics("no converged nonzero mode in Krylov spectrum".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::pauli::Axis;
    use num_traits::FromPrimitive;

    fn dephasing_model(n: usize, rate: i64) -> LindbladModel {
        let lattice = Lattice::chain(n.max(2), Boundary::Open).unwrap();
        let n_ctx = lattice.n_sites();
        let jumps = (0..n)
            .map(|i| {
                JumpOperator::with_rate(
                    OperatorSum::single(n_ctx, i, Axis::Z),
                    BigRational::from_i64(rate).unwrap(),
                )
            })
            .collect();
        LindbladModel {
            name: "dephasing".into(),
            lattice,
            hamiltonian: OperatorSum::zero(n_ctx),
            jumps,
            symmetry: None,
            charge: None,
            interaction_radius: 1,
        }
    }

    fn single_site_model(rate: i64, with_jump: bool) -> LindbladModel {
        // 2-site lattice context, operators on site 0 only, to satisfy the
        // minimum chain length
        let mut m = dephasing_model(1, rate);
        if !with_jump {
            m.jumps.clear();
        }
        m
    }

    #[test]
    fn single_qubit_dephasing_spectrum() {
        // one dephasing jump on a 2-site context: the site-0 superoperator
        // eigenvalues {0, 0, -2r, -2r} appear with 4-fold multiplicity
        let model = single_site_model(1, true);
        let lhat = vectorize(&model).unwrap().to_dense();
        let (evals, _) = linalg::eig_general(&lhat).unwrap();
        let mut zero = 0;
        let mut m2 = 0;
        for e in &evals {
            assert!(e.im.abs() < 1e-12);
            if e.norm() < 1e-12 {
                zero += 1;
            } else if (e.re + 2.0).abs() < 1e-12 {
                m2 += 1;
            } else {
                panic!("unexpected eigenvalue {e}");
            }
        }
        assert_eq!((zero, m2), (8, 8));
        let gap = spectral_gap(&model, None).unwrap();
        assert!((gap - 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_model_gap_is_zero_by_convention() {
        let model = single_site_model(1, false);
        let lhat = vectorize(&model).unwrap();
        assert_eq!(lhat.to_dense().max_abs(), 0.0);
        assert_eq!(spectral_gap(&model, None).unwrap(), 0.0);
    }

    #[test]
    fn single_qubit_hamiltonian_spectrum() {
        // H = sigma^z on site 0: eigenvalues {0, +/- 2i} (commutator spectrum)
        let mut model = single_site_model(1, false);
        model.hamiltonian = OperatorSum::single(2, 0, Axis::Z);
        let lhat = vectorize(&model).unwrap().to_dense();
        let (evals, _) = linalg::eig_general(&lhat).unwrap();
        let mut counts = (0usize, 0usize, 0usize);
        for e in &evals {
            assert!(e.re.abs() < 1e-12);
            if (e.im - 2.0).abs() < 1e-12 {
                counts.0 += 1;
            } else if (e.im + 2.0).abs() < 1e-12 {
                counts.1 += 1;
            } else if e.im.abs() < 1e-12 {
                counts.2 += 1;
            }
        }
        assert_eq!(counts, (4, 4, 8));
    }

    #[test]
    fn symbolic_application_is_trace_free_and_hermiticity_preserving() {
        let n = 3;
        let mut model = dephasing_model(n, 1);
        model.hamiltonian = OperatorSum::single(n, 0, Axis::X)
            .add(
                &OperatorSum::single(n, 0, Axis::Z)
                    .mul(&OperatorSum::single(n, 1, Axis::Z))
                    .unwrap(),
            )
            .unwrap();
        let mut rho = OperatorSum::identity(n);
        rho.add_term(PauliWord::parse("X0 Z2").unwrap(), Scalar::from_ratio(1, 3));
        rho.add_term(PauliWord::parse("Y1").unwrap(), Scalar::from_ratio(-2, 7));
        let out = model.apply_symbolic(&rho).unwrap();
        assert!(out.trace().is_zero());
        assert!(out.is_hermitian());
    }

    #[test]
    fn unital_identity_is_steady_for_hermitian_jumps() {
        let model = dephasing_model(3, 2);
        let rho = OperatorSum::identity(3);
        assert!(model.apply_symbolic(&rho).unwrap().is_zero());
    }

    #[test]
    fn vectorized_matches_symbolic_oracle() {
        let n = 3;
        let mut model = dephasing_model(n, 1);
        model.hamiltonian = OperatorSum::single(n, 1, Axis::X)
            .add(
                &OperatorSum::single(n, 0, Axis::Z)
                    .mul(&OperatorSum::single(n, 1, Axis::Z))
                    .unwrap()
                    .scale(&Scalar::from_ratio(1, 2)),
            )
            .unwrap();
        let mut rho = OperatorSum::identity(n).scale(&Scalar::from_ratio(1, 8));
        rho.add_term(PauliWord::parse("X0").unwrap(), Scalar::from_ratio(1, 5));
        rho.add_term(PauliWord::parse("Y1 Z2").unwrap(), Scalar::from_ratio(3, 11));
        let sym = model.apply_symbolic(&rho).unwrap().to_dense().unwrap();
        let lhat = vectorize(&model).unwrap();
        let rho_vec = rho.to_dense().unwrap().vec();
        let mut out = vec![Complex64::ZERO; rho_vec.len()];
        lhat.matvec(&rho_vec, &mut out);
        let num = CMat::unvec(&out, 1 << n);
        assert!(sym.sub(&num).max_abs() < 1e-12);
    }

    #[test]
    fn kron_formula_matches_block_construction() {
        // independent oracle: -i (I (x) H - H^T (x) I)
        // + conj(l) (x) l - (I (x) l'l + (l'l)^T (x) I)/2
        let n = 2;
        let mut model = dephasing_model(n, 1);
        model.hamiltonian = OperatorSum::single(n, 0, Axis::X)
            .add(&OperatorSum::single(n, 1, Axis::Y).scale(&Scalar::from_ratio(1, 2)))
            .unwrap();
        let dim = 1usize << n;
        let h = model.hamiltonian.to_dense().unwrap();
        let kron = |a: &CMat, b: &CMat| -> CMat {
            let mut out = CMat::zeros(dim * dim, dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        for l in 0..dim {
                            out[(i * dim + k, j * dim + l)] = a[(i, j)] * b[(k, l)];
                        }
                    }
                }
            }
            out
        };
        let eye = CMat::identity(dim);
        let transpose = |m: &CMat| -> CMat {
            let mut out = CMat::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    out[(j, i)] = m[(i, j)];
                }
            }
            out
        };
        let conj_mat = |m: &CMat| -> CMat {
            let mut out = m.clone();
            for z in out.data.iter_mut() {
                *z = z.conj();
            }
            out
        };
        let mut want = kron(&eye, &h).sub(&kron(&transpose(&h), &eye)).scale(-Complex64::i());
        for j in &model.jumps {
            let l = j.op.to_dense().unwrap();
            let ldl = l.dagger().matmul(&l);
            let term = kron(&conj_mat(&l), &l)
                .sub(&kron(&eye, &ldl).scale(Complex64::new(0.5, 0.0)))
                .sub(&kron(&transpose(&ldl), &eye).scale(Complex64::new(0.5, 0.0)));
            for (a, b) in want.data.iter_mut().zip(term.data.iter()) {
                *a += *b;
            }
        }
        let got = vectorize(&model).unwrap().to_dense();
        assert!(got.sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn dephasing_steady_states_split_into_projectors() {
        // two-site dephasing restricted to zero total magnetization: the two
        // steady states are the |01> and |10> projectors
        let n = 2;
        let model = dephasing_model(n, 1);
        let mut mag = OperatorSum::zero(n);
        for i in 0..n {
            mag = mag.add(&OperatorSum::single(n, i, Axis::Z)).unwrap();
        }
        let sector = SectorSpec::Charge { op: mag, value: BigRational::zero() };
        let result = steady_states(&model, Some(&sector)).unwrap();
        assert_eq!(result.degeneracy, 2);
        assert_eq!(result.states.len(), 2);
        for s in &result.dense_states {
            let (ev, _) = linalg::eig_hermitian(s).unwrap();
            assert!(ev.iter().all(|&v| v > -1e-10));
            assert!((s.trace().re - 1.0).abs() < 1e-9);
            assert!(s.trace().im.abs() < 1e-12);
        }
    }

    #[test]
    fn flip_sector_basis_is_orthonormal() {
        let spec = SectorSpec::Flip { mask: 0b111, sign: 1 };
        let basis = spec.basis(3).unwrap();
        assert_eq!(basis.dim(), 4);
        for v in &basis.vectors {
            let norm: f64 = v.iter().map(|(_, a)| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rate_scaling_scales_the_gap() {
        let g1 = spectral_gap(&single_site_model(1, true), None).unwrap();
        let g3 = spectral_gap(&single_site_model(3, true), None).unwrap();
        assert!((g3 - 3.0 * g1).abs() < 1e-9);
    }
}
