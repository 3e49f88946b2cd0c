//! O(3) acting on coefficient vectors, isotropy subgroups and their fix spaces.
//!
//! A group element acts on functions by `(g v)(x) = v(g⁻¹ x)`. Proper rotations
//! use real Wigner-D blocks; the inversion `−id` multiplies degree `ℓ` by `(−1)^ℓ`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use core::fmt;
use nalgebra::{DMatrix, Matrix3};
use num_traits::Float;

use crate::coupling::real_from_complex;
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Element of O(3) split as `±R` with `R ∈ SO(3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct O3Element {
    pub rotation: [[f64; 3]; 3],
    pub inversion: bool,
}

impl O3Element {
    pub fn identity() -> Self {
        Self::from_matrix(&Matrix3::identity())
    }

    /// Any orthogonal matrix; a negative determinant is split off as inversion.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let inversion = m.determinant() < 0.0;
        let r = if inversion { -m } else { *m };
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = r[(i, j)];
            }
        }
        Self { rotation, inversion }
    }

    pub fn from_euler(alpha: f64, beta: f64, gamma: f64, inversion: bool) -> Self {
        let r = rot_z(alpha) * rot_y(beta) * rot_z(gamma);
        let mut e = Self::from_matrix(&r);
        e.inversion = inversion;
        e
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let r = Matrix3::from_fn(|i, j| self.rotation[i][j]);
        if self.inversion {
            -r
        } else {
            r
        }
    }

    /// ZYZ Euler angles `(α, β, γ)` with `R = R_z(α) R_y(β) R_z(γ)`.
    pub fn euler(&self) -> (f64, f64, f64) {
        let r = &self.rotation;
        let sb = (r[0][2] * r[0][2] + r[1][2] * r[1][2]).sqrt();
        let beta = sb.atan2(r[2][2]);
        if sb > 1e-12 {
            (r[1][2].atan2(r[0][2]), beta, r[2][1].atan2(-r[2][0]))
        } else if r[2][2] > 0.0 {
            (r[1][0].atan2(r[0][0]), 0.0, 0.0)
        } else {
            ((-r[1][0]).atan2(-r[0][0]), PI, 0.0)
        }
    }
}

pub fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_x(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let norm1 = (0..n).map(|j| x.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm1 / (1u64 << s) as f64 > 0.5 {
        s += 1;
    }
    let a = x / (1u64 << s) as f64;
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &a / k as f64;
        sum += &term;
        if term.iter().all(|v| v.abs() < 1e-18) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Wigner small-d matrix `d^ℓ_{m'm}(β) = ⟨ℓm'| e^{−iβJ_y} |ℓm⟩`, rows/columns `m = −ℓ..=ℓ`.
pub fn wigner_small_d(l: usize, beta: f64) -> DMatrix<f64> {
    let n = 2 * l + 1;
    let lf = l as f64;
    let mut x = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        let m = i as f64 - lf;
        let c = 0.5 * beta * ((lf - m) * (lf + m + 1.0)).sqrt();
        x[(i + 1, i)] = -c;
        x[(i, i + 1)] = c;
    }
    expm(&x)
}

/// Real-basis Wigner-D block for degree `ℓ`: coefficients transform as `c' = D c`.
pub fn real_wigner_block(l: usize, alpha: f64, d: &DMatrix<f64>, gamma: f64) -> DMatrix<f64> {
    let n = 2 * l + 1;
    let li = l as i64;
    // Complex D_{m'm} = e^{−im'α} d_{m'm} e^{−imγ}.
    let dc = |mp: i64, m: i64| -> (f64, f64) {
        let v = d[((mp + li) as usize, (m + li) as usize)];
        let ph = -(mp as f64) * alpha - (m as f64) * gamma;
        (v * ph.cos(), v * ph.sin())
    };
    let mut out = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let ra = real_from_complex(a as i64 - li);
        for b in 0..n {
            let rb = real_from_complex(b as i64 - li);
            let mut acc = 0.0;
            for &((ur, ui), c) in &ra {
                for &((vr, vi), e) in &rb {
                    // conj(U_ac) · D_ce · U_be, real part
                    let (dr, di) = dc(c, e);
                    let (pr, pi) = (ur * dr + ui * di, ur * di - ui * dr);
                    acc += pr * vr - pi * vi;
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Per-degree real Wigner-D blocks of one O(3) element, up to `l_max`.
#[derive(Clone, Debug)]
pub struct RotationOperator {
    blocks: Vec<DMatrix<f64>>,
}

impl RotationOperator {
    pub fn new(g: &O3Element, l_max: usize) -> Self {
        let (alpha, beta, gamma) = g.euler();
        let blocks = (0..=l_max)
            .map(|l| {
                let mut b = real_wigner_block(l, alpha, &wigner_small_d(l, beta), gamma);
                if g.inversion && l % 2 == 1 {
                    b = -b;
                }
                b
            })
            .collect();
        Self { blocks }
    }

    pub fn l_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, l: usize) -> &DMatrix<f64> {
        &self.blocks[l]
    }

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        assert!(u.l_max() <= self.l_max(), "operator cutoff too small");
        let mut out = SpectralField::zeros(u.l_max());
        for l in 0..=u.l_max() {
            let b = &self.blocks[l];
            let src = u.block(l);
            for (i, o) in out.block_mut(l).iter_mut().enumerate() {
                *o = (0..src.len()).map(|j| b[(i, j)] * src[j]).sum();
            }
        }
        out
    }
}

/// Rotate by Euler angles, optionally composed with `−id`.
pub fn wigner_d_rotate(u: &SpectralField, alpha: f64, beta: f64, gamma: f64, invert: bool) -> SpectralField {
    RotationOperator::new(&O3Element::from_euler(alpha, beta, gamma, invert), u.l_max()).apply(u)
}

/// Named isotropy subgroups appearing in the lattices for `ℓ ≤ 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GroupName {
    O3,
    O2m,
    O2xZ2c,
    Om,
    OxZ2c,
    D6d,
    Z2c,
    Id,
    Z2m,
    D2z,
    D3z,
    D3xZ2c,
    D4xZ2c,
    D2xZ2c,
    Z2xZ2c,
}

impl GroupName {
    pub const ALL: [GroupName; 15] = [
        GroupName::O3,
        GroupName::O2m,
        GroupName::O2xZ2c,
        GroupName::Om,
        GroupName::OxZ2c,
        GroupName::D6d,
        GroupName::Z2c,
        GroupName::Id,
        GroupName::Z2m,
        GroupName::D2z,
        GroupName::D3z,
        GroupName::D3xZ2c,
        GroupName::D4xZ2c,
        GroupName::D2xZ2c,
        GroupName::Z2xZ2c,
    ];

    pub fn ident(&self) -> &'static str {
        match self {
            GroupName::O3 => "O3",
            GroupName::O2m => "O2m",
            GroupName::O2xZ2c => "O2xZ2c",
            GroupName::Om => "Om",
            GroupName::OxZ2c => "OxZ2c",
            GroupName::D6d => "D6d",
            GroupName::Z2c => "Z2c",
            GroupName::Id => "id",
            GroupName::Z2m => "Z2m",
            GroupName::D2z => "D2z",
            GroupName::D3z => "D3z",
            GroupName::D3xZ2c => "D3xZ2c",
            GroupName::D4xZ2c => "D4xZ2c",
            GroupName::D2xZ2c => "D2xZ2c",
            GroupName::Z2xZ2c => "Z2xZ2c",
        }
    }

    /// Conventional symbol.
    pub fn symbol(&self) -> &'static str {
        match self {
            GroupName::O3 => "O(3)",
            GroupName::O2m => "O(2)⁻",
            GroupName::O2xZ2c => "O(2)⊕Z₂ᶜ",
            GroupName::Om => "O⁻",
            GroupName::OxZ2c => "O⊕Z₂ᶜ",
            GroupName::D6d => "D₆ᵈ",
            GroupName::Z2c => "Z₂ᶜ",
            GroupName::Id => "id",
            GroupName::Z2m => "Z₂⁻",
            GroupName::D2z => "D₂ᶻ",
            GroupName::D3z => "D₃ᶻ",
            GroupName::D3xZ2c => "D₃⊕Z₂ᶜ",
            GroupName::D4xZ2c => "D₄⊕Z₂ᶜ",
            GroupName::D2xZ2c => "D₂⊕Z₂ᶜ",
            GroupName::Z2xZ2c => "Z₂⊕Z₂ᶜ",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        Self::ALL.iter().copied().find(|g| g.ident().eq_ignore_ascii_case(t) || g.symbol() == t).or(match t {
            "O(2)-" | "O2-" | "O2" | "O(2)" => Some(GroupName::O2m),
            "O-" => Some(GroupName::Om),
            "O-xZ2c" | "OmxZ2c" | "Oh" => Some(GroupName::OxZ2c),
            "D3h" => Some(GroupName::D6d),
            _ => None,
        })
    }

    /// `dim O(3) − dim K`.
    pub fn orbit_dim(&self) -> usize {
        match self {
            GroupName::O3 => 0,
            GroupName::O2m | GroupName::O2xZ2c => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ident())
    }
}

/// How the Reynolds average is realized.
#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    /// Everything but the constants is averaged away.
    Full,
    /// Axisymmetric: keep `m = 0`, optionally only even degrees.
    Axial { even_only: bool },
    /// Explicit finite element list.
    Finite(Vec<O3Element>),
}

/// Closure of a generating set under multiplication.
fn generate(gens: &[Matrix3<f64>]) -> Vec<Matrix3<f64>> {
    let mut elems = vec![Matrix3::identity()];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in gens {
                let p = g * a;
                if !elems.iter().any(|e| (e - p).abs().max() < 1e-9) {
                    elems.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    elems
}

fn mirror_z() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0))
}

fn mirror_y() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, 1.0))
}

fn inversion() -> Matrix3<f64> {
    -Matrix3::identity()
}

fn finite_elements(name: GroupName) -> Vec<Matrix3<f64>> {
    let third = 2.0 * PI / 3.0;
    match name {
        GroupName::OxZ2c => generate(&[rot_z(FRAC_PI_2), rot_x(FRAC_PI_2), inversion()]),
        GroupName::Om => {
            // Tetrahedral group with roto-inversions, turned so that z(x²−y²) is invariant.
            let s4 = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0);
            let c3 = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
            let r = rot_z(FRAC_PI_4);
            generate(&[s4, c3]).into_iter().map(|g| r * g * r.transpose()).collect()
        }
        GroupName::D6d => generate(&[rot_z(third), rot_x(PI), mirror_z()]),
        GroupName::Z2c => generate(&[inversion()]),
        GroupName::Id => generate(&[]),
        GroupName::Z2m => generate(&[mirror_z()]),
        GroupName::D2z => generate(&[rot_z(PI), mirror_y()]),
        GroupName::D3z => generate(&[rot_z(third), mirror_y()]),
        GroupName::D3xZ2c => generate(&[rot_z(third), rot_x(PI), inversion()]),
        GroupName::D4xZ2c => generate(&[rot_z(FRAC_PI_2), rot_x(PI), inversion()]),
        GroupName::D2xZ2c => generate(&[rot_z(PI), rot_x(PI), inversion()]),
        GroupName::Z2xZ2c => generate(&[rot_z(PI), inversion()]),
        GroupName::O3 | GroupName::O2m | GroupName::O2xZ2c => Vec::new(),
    }
}

/// A subgroup of O(3) with its projection recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub name: GroupName,
    pub projection: Projection,
}

impl Group {
    pub fn new(name: GroupName) -> Self {
        let projection = match name {
            GroupName::O3 => Projection::Full,
            GroupName::O2m => Projection::Axial { even_only: false },
            GroupName::O2xZ2c => Projection::Axial { even_only: true },
            _ => Projection::Finite(finite_elements(name).iter().map(O3Element::from_matrix).collect()),
        };
        Self { name, projection }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.projection {
            Projection::Finite(e) => Some(e.len()),
            _ => None,
        }
    }

    pub fn elements(&self) -> &[O3Element] {
        match &self.projection {
            Projection::Finite(e) => e,
            _ => &[],
        }
    }

    /// Precomputed projector blocks up to `l_max`.
    pub fn projector(&self, l_max: usize) -> Projector {
        let blocks = match &self.projection {
            Projection::Full => (0..=l_max)
                .map(|l| if l == 0 { DMatrix::identity(1, 1) } else { DMatrix::zeros(2 * l + 1, 2 * l + 1) })
                .collect(),
            Projection::Axial { even_only } => (0..=l_max)
                .map(|l| {
                    let mut b = DMatrix::zeros(2 * l + 1, 2 * l + 1);
                    if !*even_only || l % 2 == 0 {
                        b[(l, l)] = 1.0;
                    }
                    b
                })
                .collect(),
            Projection::Finite(elems) => {
                let mut blocks: Vec<DMatrix<f64>> = (0..=l_max).map(|l| DMatrix::zeros(2 * l + 1, 2 * l + 1)).collect();
                // Cache small-d matrices by β; finite groups only use a handful of values.
                let mut dcache: Vec<(f64, Vec<DMatrix<f64>>)> = Vec::new();
                for g in elems {
                    let (alpha, beta, gamma) = g.euler();
                    let pos = dcache.iter().position(|(b, _)| (b - beta).abs() < 1e-12);
                    let ds = match pos {
                        Some(p) => &dcache[p].1,
                        None => {
                            dcache.push((beta, (0..=l_max).map(|l| wigner_small_d(l, beta)).collect()));
                            &dcache.last().unwrap().1
                        }
                    };
                    for l in 0..=l_max {
                        let mut b = real_wigner_block(l, alpha, &ds[l], gamma);
                        if g.inversion && l % 2 == 1 {
                            b = -b;
                        }
                        blocks[l] += b;
                    }
                }
                let n = elems.len() as f64;
                blocks.into_iter().map(|b| b / n).collect()
            }
        };
        Projector { blocks }
    }
}

/// Reynolds projector stored block by block.
#[derive(Clone, Debug)]
pub struct Projector {
    blocks: Vec<DMatrix<f64>>,
}

impl Projector {
    pub fn l_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, l: usize) -> &DMatrix<f64> {
        &self.blocks[l]
    }

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        assert!(u.l_max() <= self.l_max(), "projector cutoff too small");
        let mut out = SpectralField::zeros(u.l_max());
        for l in 0..=u.l_max() {
            let b = &self.blocks[l];
            let src = u.block(l);
            for (i, o) in out.block_mut(l).iter_mut().enumerate() {
                *o = (0..src.len()).map(|j| b[(i, j)] * src[j]).sum();
            }
        }
        out
    }

    /// `dim Fix_{V_ℓ}(K)` as the trace of the block.
    pub fn fix_dim(&self, l: usize) -> usize {
        self.blocks[l].trace().round() as usize
    }

    /// Orthonormal basis of the fix space in `V_ℓ`.
    pub fn fix_basis_block(&self, l: usize) -> Vec<Vec<f64>> {
        let b = &self.blocks[l];
        let sym = (b + b.transpose()) * 0.5;
        let (vals, vecs) = crate::linalg::sym_eigen(sym);
        let mut out = Vec::new();
        for (k, v) in vals.iter().enumerate() {
            if *v > 0.5 {
                let mut col: Vec<f64> = vecs.column(k).iter().copied().collect();
                // Deterministic sign: largest entry positive.
                let imax = (0..col.len()).max_by(|&i, &j| col[i].abs().total_cmp(&col[j].abs())).unwrap_or(0);
                if col[imax] < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
                out.push(col);
            }
        }
        out
    }

    /// Orthonormal basis of `Fix(K)` in all degrees `≤ l_max`, with each vector's degree.
    pub fn fix_basis(&self, l_max: usize) -> Vec<(usize, SpectralField)> {
        let mut out = Vec::new();
        for l in 0..=l_max.min(self.l_max()) {
            for col in self.fix_basis_block(l) {
                let mut u = SpectralField::zeros(l_max);
                u.block_mut(l).copy_from_slice(&col);
                out.push((l, u));
            }
        }
        out
    }
}

/// Fix-space generator `e_K` of a one-dimensional fix space.
pub fn fix_generator(name: GroupName, ell: usize, l_max: usize) -> Result<SpectralField> {
    let unknown = || Error::UnknownPair { group: name.ident().to_string(), ell };
    if ell > l_max {
        return Err(Error::ResolutionMismatch { grid: l_max, needed: ell });
    }
    let mut e = SpectralField::zeros(l_max);
    match (name, ell) {
        (GroupName::O2m, l) if l % 2 == 1 => e.set(l, 0, 1.0),
        (GroupName::O2xZ2c, l) if l % 2 == 0 && l > 0 => e.set(l, 0, 1.0),
        (GroupName::Om, 3) => e.set(3, 2, 1.0),
        (GroupName::D6d, 3) => e.set(3, 3, 1.0),
        (GroupName::OxZ2c, 4) => {
            let c = 0.5 * (7.0_f64 / 3.0).sqrt();
            e.set(4, 0, c);
            e.set(4, 4, c * (5.0_f64 / 7.0).sqrt());
        }
        _ => return Err(unknown()),
    }
    Ok(e)
}

/// The five symmetry-breaking pairs `(K, ℓ)` with one-dimensional fix space for `ℓ ≤ 4`.
pub const TABLE_PAIRS: [(GroupName, usize); 7] = [
    (GroupName::O2m, 1),
    (GroupName::O2xZ2c, 2),
    (GroupName::O2m, 3),
    (GroupName::Om, 3),
    (GroupName::D6d, 3),
    (GroupName::O2xZ2c, 4),
    (GroupName::OxZ2c, 4),
];

/// Named subgroup together with its degree, generator and projector.
#[derive(Clone, Debug)]
pub struct IsotropyDescriptor {
    pub group: Group,
    pub ell: usize,
    pub generator: SpectralField,
    pub orbit_dim: usize,
    projector: Projector,
}

impl IsotropyDescriptor {
    pub fn new(name: GroupName, ell: usize, l_max: usize) -> Result<Self> {
        let generator = fix_generator(name, ell, l_max)?;
        let group = Group::new(name);
        let projector = group.projector(l_max);
        Ok(Self { group, ell, generator, orbit_dim: name.orbit_dim(), projector })
    }

    pub fn name(&self) -> GroupName {
        self.group.name
    }

    pub fn l_max(&self) -> usize {
        self.projector.l_max()
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    /// `ℓ ↦ dim Fix_{V_ℓ}(K)` for `ℓ ≤ up_to`.
    pub fn fix_dims(&self, up_to: usize) -> Vec<(usize, usize)> {
        (0..=up_to.min(self.l_max())).map(|l| (l, self.projector.fix_dim(l))).collect()
    }

    /// Euler triples and inversion flags of the stored elements.
    pub fn elements_euler(&self) -> Vec<(f64, f64, f64, bool)> {
        self.group
            .elements()
            .iter()
            .map(|g| {
                let (a, b, c) = g.euler();
                (a, b, c, g.inversion)
            })
            .collect()
    }

    pub fn label(&self) -> String {
        alloc::format!("{}@{}", self.group.name.ident(), self.ell)
    }
}

/// Reynolds average of `u` over `K`.
pub fn reynolds_project(u: &SpectralField, k: &IsotropyDescriptor) -> SpectralField {
    if u.l_max() <= k.l_max() {
        k.projector.apply(u)
    } else {
        k.group.projector(u.l_max()).apply(u)
    }
}

/// `‖u − P_K u‖`.
pub fn isotropy_residual(u: &SpectralField, k: &IsotropyDescriptor) -> f64 {
    u.sub(&reynolds_project(u, k)).norm()
}

/// Fix-space dimensions of the isotropy lattices for `ℓ = 0..=4`.
pub const LATTICE: [(usize, &[(GroupName, usize)]); 5] = [
    (0, &[(GroupName::O3, 1)]),
    (1, &[(GroupName::O3, 0), (GroupName::O2m, 1), (GroupName::Id, 3)]),
    (2, &[(GroupName::O3, 0), (GroupName::O2xZ2c, 1), (GroupName::Z2c, 5)]),
    (
        3,
        &[
            (GroupName::O3, 0),
            (GroupName::Om, 1),
            (GroupName::O2m, 1),
            (GroupName::D6d, 1),
            (GroupName::D2z, 2),
            (GroupName::D3z, 2),
            (GroupName::Z2m, 4),
            (GroupName::Id, 7),
        ],
    ),
    (
        4,
        &[
            (GroupName::O3, 0),
            (GroupName::O2xZ2c, 1),
            (GroupName::OxZ2c, 1),
            (GroupName::D3xZ2c, 2),
            (GroupName::D4xZ2c, 2),
            (GroupName::D2xZ2c, 3),
            (GroupName::Z2xZ2c, 5),
            (GroupName::Z2c, 9),
        ],
    ),
];

/// One row of the lattice comparison.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeEntry {
    pub ell: usize,
    pub group: GroupName,
    pub expected_dim: usize,
    pub computed_dim: usize,
}

/// Projector traces for every lattice entry.
pub fn lattice_dims() -> Vec<LatticeEntry> {
    let mut out = Vec::new();
    for (ell, entries) in LATTICE {
        for &(group, expected_dim) in entries {
            let computed_dim = Group::new(group).projector(ell).fix_dim(ell);
            out.push(LatticeEntry { ell, group, expected_dim, computed_dim });
        }
    }
    out
}
