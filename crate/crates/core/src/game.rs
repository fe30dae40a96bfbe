//! Bimatrix games, mixed profiles and the quantities defined on them:
//! payoffs, value, conditional value and regret.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for simplex sums and equilibrium checks.
pub const TOL: f64 = 1e-9;

/// A two-player game given by two equal-shape payoff matrices with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    m_row: Array2<f64>,
    m_col: Array2<f64>,
    labels: Option<Labels>,
}

/// Optional strategy names for each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

impl BimatrixGame {
    pub fn new(m_row: Array2<f64>, m_col: Array2<f64>) -> Result<Self> {
        if m_row.dim() != m_col.dim() {
            return Err(Error::DimensionMismatch(format!(
                "row payoffs are {:?}, column payoffs are {:?}",
                m_row.dim(),
                m_col.dim()
            )));
        }
        if m_row.nrows() == 0 || m_row.ncols() == 0 {
            return Err(Error::DimensionMismatch("game has no strategies".into()));
        }
        for m in [&m_row, &m_col] {
            if let Some(((row, col), &value)) = m
                .indexed_iter()
                .find(|(_, &v)| !(0.0..=1.0).contains(&v))
            {
                return Err(Error::PayoffOutOfRange { row, col, value });
            }
        }
        Ok(Self {
            m_row,
            m_col,
            labels: None,
        })
    }

    pub fn from_rows(m_row: Vec<Vec<f64>>, m_col: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(to_array(m_row)?, to_array(m_col)?)
    }

    /// Rescales arbitrary real payoffs into `[0, 1]` with one affine map shared by
    /// both players, so equilibria and value comparisons are preserved.
    pub fn normalize(m_row: Array2<f64>, m_col: Array2<f64>) -> Result<Self> {
        let lo = m_row
            .iter()
            .chain(m_col.iter())
            .fold(f64::INFINITY, |a, &b| a.min(b));
        let hi = m_row
            .iter()
            .chain(m_col.iter())
            .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter("payoffs must be finite".into()));
        }
        let span = hi - lo;
        let map = |v: f64| if span > 0.0 { (v - lo) / span } else { 0.0 };
        Self::new(m_row.mapv(map), m_col.mapv(map))
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.rows.len() != self.rows() || labels.cols.len() != self.cols() {
            return Err(Error::DimensionMismatch(
                "label counts do not match the game shape".into(),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.m_row.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m_row.ncols()
    }

    pub fn m_row(&self) -> &Array2<f64> {
        &self.m_row
    }

    pub fn m_col(&self) -> &Array2<f64> {
        &self.m_col
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// Transposed game: the column player becomes the row player.
    pub fn transpose(&self) -> Self {
        Self {
            m_row: self.m_col.t().to_owned(),
            m_col: self.m_row.t().to_owned(),
            labels: self.labels.as_ref().map(|l| Labels {
                rows: l.cols.clone(),
                cols: l.rows.clone(),
            }),
        }
    }

    fn check(&self, p: &MixedProfile) -> Result<()> {
        if p.x.len() != self.rows() || p.y.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "profile is {}x{}, game is {}x{}",
                p.x.len(),
                p.y.len(),
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }

    /// `M_row y`: the row player's payoff for each pure row against `y`.
    pub fn row_payoff_vector(&self, y: &[f64]) -> Array1<f64> {
        self.m_row.dot(&ArrayView1::from(y))
    }

    /// `xᵀ M_col`: the column player's payoff for each pure column against `x`.
    pub fn col_payoff_vector(&self, x: &[f64]) -> Array1<f64> {
        ArrayView1::from(x).dot(&self.m_col)
    }

    /// Lowest-index best response of the row player to a column strategy.
    pub fn row_best_response(&self, y: &[f64]) -> usize {
        argmax(self.row_payoff_vector(y).iter().copied())
    }

    /// Lowest-index best response of the column player to a row strategy.
    pub fn col_best_response(&self, x: &[f64]) -> usize {
        argmax(self.col_payoff_vector(x).iter().copied())
    }

    /// Expected payoffs `(xᵀ M_row y, xᵀ M_col y)`.
    pub fn payoffs(&self, p: &MixedProfile) -> Result<(f64, f64)> {
        self.check(p)?;
        let x = ArrayView1::from(&p.x);
        let y = ArrayView1::from(&p.y);
        Ok((
            x.dot(&self.row_payoff_vector(&p.y)),
            self.col_payoff_vector(&p.x).dot(&y),
        ))
    }

    /// Average payoff of the two players.
    pub fn value(&self, p: &MixedProfile) -> Result<f64> {
        let (r, c) = self.payoffs(p)?;
        Ok(0.5 * (r + c))
    }

    pub fn regret(&self, p: &MixedProfile) -> Result<RegretCertificate> {
        self.check(p)?;
        let row_vec = self.row_payoff_vector(&p.y);
        let col_vec = self.col_payoff_vector(&p.x);
        let payoff_row = ArrayView1::from(&p.x).dot(&row_vec);
        let payoff_col = col_vec.dot(&ArrayView1::from(&p.y));
        let best_row = row_vec.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_col = col_vec.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(RegretCertificate {
            regret_row: (best_row - payoff_row).max(0.0),
            regret_col: (best_col - payoff_col).max(0.0),
            value: 0.5 * (payoff_row + payoff_col),
            payoff_row,
            payoff_col,
        })
    }

    pub fn is_eps_equilibrium(&self, p: &MixedProfile, eps: f64) -> Result<bool> {
        if eps < 0.0 {
            return Err(Error::NegativeEpsilon(eps));
        }
        Ok(self.regret(p)?.max_regret() <= eps + TOL)
    }

    /// Value of the profile conditioned on both players playing inside `set`.
    pub fn conditional_value(&self, p: &MixedProfile, set: &[usize]) -> Result<f64> {
        self.check(p)?;
        let xs = project(&p.x, set)?;
        let ys = project(&p.y, set)?;
        let mass_x: f64 = xs.iter().sum();
        let mass_y: f64 = ys.iter().sum();
        if mass_x <= 0.0 || mass_y <= 0.0 {
            return Err(Error::EmptyConditioning);
        }
        let unnormalized = 0.5
            * (ArrayView1::from(&xs).dot(&self.m_row.dot(&ArrayView1::from(&ys)))
                + ArrayView1::from(&xs).dot(&self.m_col.dot(&ArrayView1::from(&ys))));
        Ok(unnormalized / (mass_x * mass_y))
    }
}

fn to_array(rows: Vec<Vec<f64>>) -> Result<Array2<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch("ragged payoff matrix".into()));
    }
    Array2::from_shape_vec((r, c), rows.into_iter().flatten().collect())
        .map_err(|e| Error::DimensionMismatch(e.to_string()))
}

/// Index of the first maximum.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Copy of `v` with every coordinate outside `set` zeroed.
fn project(v: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; v.len()];
    for &i in set {
        let src = v.get(i).ok_or_else(|| {
            Error::DimensionMismatch(format!("index {i} out of range for length {}", v.len()))
        })?;
        out[i] = *src;
    }
    Ok(out)
}

/// Pair of mixed strategies `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct MixedProfile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TryFrom<RawProfile> for MixedProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        MixedProfile::new(raw.x, raw.y)
    }
}

impl MixedProfile {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_simplex(&x)?;
        check_simplex(&y)?;
        Ok(Self { x, y })
    }

    pub fn pure(rows: usize, cols: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(unit(rows, i)?, unit(cols, j)?)
    }

    pub fn support_x(&self) -> Vec<usize> {
        support(&self.x)
    }

    pub fn support_y(&self) -> Vec<usize> {
        support(&self.y)
    }
}

/// Standard basis vector `e_i` of length `len`.
pub fn unit(len: usize, i: usize) -> Result<Vec<f64>> {
    if i >= len {
        return Err(Error::DimensionMismatch(format!(
            "index {i} out of range for length {len}"
        )));
    }
    let mut v = vec![0.0; len];
    v[i] = 1.0;
    Ok(v)
}

/// Uniform distribution over `set` inside a vector of length `len`.
pub fn uniform_on(len: usize, set: &[usize]) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::InvalidProbability("uniform over an empty set".into()));
    }
    let mut v = vec![0.0; len];
    let w = 1.0 / set.len() as f64;
    for &i in set {
        *v.get_mut(i).ok_or_else(|| {
            Error::DimensionMismatch(format!("index {i} out of range for length {len}"))
        })? += w;
    }
    Ok(v)
}

pub fn support(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, _)| i)
        .collect()
}

pub fn check_simplex(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidProbability("empty vector".into()));
    }
    if let Some(p) = v.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidProbability(format!("entry {p} is negative")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(Error::InvalidProbability(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// ε-witnesses of a profile together with its payoffs and value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretCertificate {
    pub regret_row: f64,
    pub regret_col: f64,
    pub value: f64,
    pub payoff_row: f64,
    pub payoff_col: f64,
}

impl RegretCertificate {
    pub fn max_regret(&self) -> f64 {
        self.regret_row.max(self.regret_col)
    }
}

/// Total variation distance `½ Σ |a_i − b_i|` of two probability vectors.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    // Disjoint supports give exactly 1, independent of rounding in the sums.
    if a.iter().zip(b).all(|(p, q)| p.min(*q) <= 0.0) {
        return Ok(1.0);
    }
    Ok(0.5 * a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum::<f64>())
}

/// `v_S / ‖v_S‖`, zero outside `set`.
pub fn restrict_normalize(v: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let mut out = project(v, set)?;
    let mass: f64 = out.iter().sum();
    if mass <= 0.0 {
        return Err(Error::EmptyConditioning);
    }
    out.iter_mut().for_each(|p| *p /= mass);
    Ok(out)
}

/// Probability mass `‖v_S‖`.
pub fn mass(v: &[f64], set: impl IntoIterator<Item = usize>) -> f64 {
    set.into_iter().map(|i| v[i]).sum()
}

/// JSON layout of a game file: `{"rows", "cols", "m_row", "m_col"}`.
#[derive(Serialize, Deserialize)]
struct GameFile {
    rows: usize,
    cols: usize,
    m_row: Vec<Vec<f64>>,
    m_col: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Labels>,
}

impl Serialize for BimatrixGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |m: &Array2<f64>| m.outer_iter().map(|r| r.to_vec()).collect();
        GameFile {
            rows: self.rows(),
            cols: self.cols(),
            m_row: rows(&self.m_row),
            m_col: rows(&self.m_col),
            labels: self.labels.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BimatrixGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = GameFile::deserialize(d)?;
        let game = BimatrixGame::from_rows(file.m_row, file.m_col).map_err(D::Error::custom)?;
        if game.rows() != file.rows || game.cols() != file.cols {
            return Err(D::Error::custom(format!(
                "declared shape {}x{} does not match payoffs {}x{}",
                file.rows,
                file.cols,
                game.rows(),
                game.cols()
            )));
        }
        match file.labels {
            Some(l) => game.with_labels(l).map_err(D::Error::custom),
            None => Ok(game),
        }
    }
}
