//! Problem data for one selection step: dissimilarities and losses of the
//! incoming batch against itself and against the current representatives,
//! plus the formulation knobs shared by every solver.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{OssError, Result};
use crate::matrix::Matrix;

/// Group norm applied to each new column of the assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "inf")]
    LInf,
}

impl Norm {
    pub fn of(self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            Norm::L1 => values.map(f64::abs).sum(),
            Norm::LInf => values.fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => f.write_str("1"),
            Norm::LInf => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = OssError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(Norm::L1),
            "inf" | "infinity" | "linf" => Ok(Norm::LInf),
            other => Err(OssError::Config(format!("unsupported norm {other:?}; expected 1 or inf"))),
        }
    }
}

/// Formulation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Weight of the pairwise criterion; `1 - rho` weighs the pointwise one.
    pub rho: f64,
    /// Group-sparsity weight of the baseline convex formulation.
    pub lambda: f64,
    pub p: Norm,
    /// Saturation level of the thresholded credit.
    pub epsilon: f64,
    /// Fraction of the incoming batch allowed into the representative set.
    pub frac: f64,
    /// A new column is selected when its mass reaches this value.
    pub rounding_threshold: f64,
    pub feasibility_tol: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            rho: 0.5,
            lambda: 0.5,
            p: Norm::LInf,
            epsilon: 0.9,
            frac: 0.2,
            rounding_threshold: 0.9,
            feasibility_tol: 1e-8,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(OssError::Config(format!("rho = {} not in [0, 1]", self.rho)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(OssError::Config(format!("lambda = {} must be finite and nonnegative", self.lambda)));
        }
        if !in_unit(self.epsilon) {
            return Err(OssError::Config(format!("epsilon = {} not in (0, 1]", self.epsilon)));
        }
        if !in_unit(self.frac) {
            return Err(OssError::Config(format!("frac = {} not in (0, 1]", self.frac)));
        }
        if !in_unit(self.rounding_threshold) {
            return Err(OssError::Config(format!(
                "rounding_threshold = {} not in (0, 1]",
                self.rounding_threshold
            )));
        }
        if !(self.feasibility_tol > 0.0 && self.feasibility_tol < 1e-2) {
            return Err(OssError::Config(format!("feasibility_tol = {} out of range", self.feasibility_tol)));
        }
        Ok(())
    }

    /// Sets epsilon and keeps the rounding threshold tied to it.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.rounding_threshold = epsilon;
        self
    }

    /// Column-mass selection rule shared by all convex solvers: mass at or
    /// above the threshold, up to the feasibility tolerance.
    pub fn is_selected(&self, column_mass: f64) -> bool {
        column_mass >= self.rounding_threshold - 1e-6_f64.max(self.feasibility_tol)
    }
}

/// Dissimilarities and losses for one batch step. `m` incoming frames, `r`
/// current representatives (possibly zero).
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionInstance {
    /// `m x r`: incoming frame `i` to representative `j`.
    pub d_old: Matrix,
    /// `m x m`: incoming frame `i` to incoming frame `j`.
    pub d_new: Matrix,
    pub loss_old: Vec<f64>,
    pub loss_new: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape(String),
    NonFinite { block: &'static str, i: usize, j: usize },
    NegativeDissimilarity { block: &'static str, i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    NegativeLoss { old: bool, j: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::NonFinite { block, i, j } => write!(f, "non-finite {block} entry at ({i},{j})"),
            Violation::NegativeDissimilarity { block, i, j, value } => {
                write!(f, "negative {block} dissimilarity {value} at ({i},{j})")
            }
            Violation::NonzeroDiagonal { i, .. } => write!(f, "nonzero diagonal at i={i}"),
            Violation::NegativeLoss { old: false, j, .. } => write!(f, "negative loss at j={j}"),
            Violation::NegativeLoss { old: true, j, .. } => write!(f, "negative old loss at j={j}"),
        }
    }
}

impl SelectionInstance {
    /// Builds an instance and rejects it if any invariant is violated.
    pub fn new(d_old: Matrix, d_new: Matrix, loss_old: Vec<f64>, loss_new: Vec<f64>) -> Result<Self> {
        let inst = SelectionInstance { d_old, d_new, loss_old, loss_new };
        inst.ensure_valid()?;
        Ok(inst)
    }

    /// Cold start: no representatives yet.
    pub fn without_old(d_new: Matrix, loss_new: Vec<f64>) -> Result<Self> {
        let m = d_new.rows();
        Self::new(Matrix::zeros(m, 0), d_new, Vec::new(), loss_new)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.d_new.rows()
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.loss_old.len()
    }

    /// Every violated invariant, with locations. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = self.d_new.rows();
        let r = self.loss_old.len();
        if self.d_new.cols() != m {
            out.push(Violation::Shape(format!("d_new is {}x{}, expected square", m, self.d_new.cols())));
        }
        if self.loss_new.len() != m {
            out.push(Violation::Shape(format!("loss_new has length {}, expected {m}", self.loss_new.len())));
        }
        if self.d_old.rows() != m || self.d_old.cols() != r {
            out.push(Violation::Shape(format!(
                "d_old is {}x{}, expected {m}x{r}",
                self.d_old.rows(),
                self.d_old.cols()
            )));
        }
        for (block, mat) in [("old", &self.d_old), ("new", &self.d_new)] {
            for i in 0..mat.rows() {
                for j in 0..mat.cols() {
                    let v = mat.get(i, j);
                    if !v.is_finite() {
                        out.push(Violation::NonFinite { block, i, j });
                    } else if v < 0.0 {
                        out.push(Violation::NegativeDissimilarity { block, i, j, value: v });
                    }
                }
            }
        }
        for i in 0..m.min(self.d_new.cols()) {
            let v = self.d_new.get(i, i);
            if v != 0.0 && v.is_finite() {
                out.push(Violation::NonzeroDiagonal { i, value: v });
            }
        }
        for (old, losses) in [(true, &self.loss_old), (false, &self.loss_new)] {
            for (j, &v) in losses.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation::NonFinite { block: if old { "loss_old" } else { "loss_new" }, i: 0, j });
                } else if v < 0.0 {
                    out.push(Violation::NegativeLoss { old, j, value: v });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(OssError::InvalidInstance(v.iter().map(ToString::to_string).collect()))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        raw.into_instance()
    }

    pub fn read_json(mut reader: impl Read) -> Result<Self> {
        let mut s = String::new();
        reader.read_to_string(&mut s)?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        self.to_json_with_meta(None)
    }

    /// Serializes with an optional `"meta"` object (generator seed, sizes).
    /// Readers ignore it.
    pub fn to_json_with_meta(&self, meta: Option<serde_json::Value>) -> String {
        let raw = InstanceJson {
            d_old: (self.r() > 0).then(|| self.d_old.to_rows()),
            d_new: self.d_new.to_rows(),
            loss_old: (self.r() > 0).then(|| self.loss_old.clone()),
            loss_new: self.loss_new.clone(),
            meta,
        };
        to_json_17g(&raw).expect("instance serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_old: Option<Vec<Vec<f64>>>,
    d_new: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loss_old: Option<Vec<f64>>,
    loss_new: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

impl InstanceJson {
    fn into_instance(self) -> Result<SelectionInstance> {
        let m = self.d_new.len();
        let loss_old = self.loss_old.unwrap_or_default();
        let r = loss_old.len();
        let d_new = Matrix::from_rows(self.d_new).ok_or_else(|| OssError::Parse("ragged d_new".into()))?;
        let d_old = match self.d_old {
            Some(rows) => {
                Matrix::from_rows_with_cols(rows, r).ok_or_else(|| OssError::Parse("d_old width differs from loss_old".into()))?
            }
            None => Matrix::zeros(m, 0),
        };
        SelectionInstance::new(d_old, d_new, loss_old, self.loss_new)
    }
}

/// Cumulative dissimilarities `rho * d_ij - (1 - rho) * L_j` for both blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrices {
    pub q_old: Matrix,
    pub q_new: Matrix,
}

impl QMatrices {
    pub fn m(&self) -> usize {
        self.q_new.rows()
    }

    pub fn r(&self) -> usize {
        self.q_old.cols()
    }
}

pub fn build_q(instance: &SelectionInstance, rho: f64) -> QMatrices {
    let blend = |d: &Matrix, loss: &[f64]| Matrix::from_fn(d.rows(), d.cols(), |i, j| rho * d.get(i, j) - (1.0 - rho) * loss[j]);
    QMatrices { q_old: blend(&instance.d_old, &instance.loss_old), q_new: blend(&instance.d_new, &instance.loss_new) }
}

/// One streamed frame: an id, its feature vector, an optional precomputed
/// loss, and the (1-based) batch it arrives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub id: String,
    pub batch: usize,
    pub loss: Option<f64>,
    pub features: Vec<f64>,
}

impl FrameRecord {
    pub fn new(id: impl Into<String>, batch: usize, features: Vec<f64>) -> Self {
        FrameRecord { id: id.into(), batch, loss: None, features }
    }

    pub fn with_loss(mut self, loss: f64) -> Self {
        self.loss = Some(loss);
        self
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_dims(frames: &[FrameRecord], dim: usize) -> Result<()> {
    match frames.iter().find(|f| f.features.len() != dim) {
        Some(f) => Err(OssError::Dimension(format!(
            "frame {} has {} features, expected {dim}",
            f.id,
            f.features.len()
        ))),
        None => Ok(()),
    }
}

/// Euclidean distances between feature vectors, min-max normalized over the
/// whole matrix into `[0, 1]`. A constant matrix normalizes to zeros.
pub fn dissimilarity_from_features(frames_a: &[FrameRecord], frames_b: &[FrameRecord]) -> Result<Matrix> {
    if frames_a.is_empty() || frames_b.is_empty() {
        return Err(OssError::Empty("dissimilarity needs two nonempty frame lists".into()));
    }
    let dim = frames_a[0].features.len();
    check_dims(frames_a, dim)?;
    check_dims(frames_b, dim)?;
    let raw = Matrix::from_fn(frames_a.len(), frames_b.len(), |i, j| euclidean(&frames_a[i].features, &frames_b[j].features));
    Ok(min_max_normalize(&raw))
}

pub(crate) fn min_max_normalize(raw: &Matrix) -> Matrix {
    let (lo, hi) = raw.as_slice().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if !(span > 0.0) {
        return Matrix::zeros(raw.rows(), raw.cols());
    }
    raw.map(|v| (v - lo) / span)
}

/// Shifts a score vector so its minimum is zero when any entry is negative.
/// Returns the shift applied (zero when nothing was negative).
pub fn shift_nonnegative(losses: &mut [f64]) -> f64 {
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        for l in losses.iter_mut() {
            *l -= min;
        }
        -min
    } else {
        0.0
    }
}

/// Formats a double with 17 significant digits, `%.17g` style.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mantissa = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{exp}")
    }
}

/// Compact JSON with every non-integer number written by [`fmt_f64`].
pub fn to_json_17g<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = String::new();
    write_value(&serde_json::to_value(value)?, &mut out);
    Ok(out)
}

fn write_value(v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => out.push_str(&fmt_f64(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Reads the stream CSV (`id,batch,loss,f0,f1,...`). Feature dimension must
/// agree across rows; an empty loss cell means "to be scored".
pub fn read_stream_csv(reader: impl Read) -> Result<Vec<FrameRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| OssError::Parse(e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 3 || names[0] != "id" || names[1] != "batch" || names[2] != "loss" {
        return Err(OssError::Parse(format!("expected header id,batch,loss,f0,..., got {}", names.join(","))));
    }
    let dim = names.len() - 3;
    let mut frames = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| OssError::Parse(e.to_string()))?;
        let bad = |what: &str| OssError::Parse(format!("row {}: bad {what}", line + 2));
        if rec.len() != dim + 3 {
            return Err(bad("field count"));
        }
        let batch: usize = rec[1].parse().map_err(|_| bad("batch"))?;
        if batch == 0 {
            return Err(bad("batch (must be >= 1)"));
        }
        let loss = if rec[2].is_empty() { None } else { Some(rec[2].parse::<f64>().map_err(|_| bad("loss"))?) };
        let features = (3..rec.len()).map(|k| rec[k].parse::<f64>().map_err(|_| bad("feature"))).collect::<Result<Vec<_>>>()?;
        frames.push(FrameRecord { id: rec[0].to_string(), batch, loss, features });
    }
    Ok(frames)
}

pub fn write_stream_csv(frames: &[FrameRecord], writer: impl Write) -> Result<()> {
    let dim = frames.first().map_or(0, |f| f.features.len());
    check_dims(frames, dim)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let mut header = vec!["id".to_string(), "batch".into(), "loss".into()];
    header.extend((0..dim).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(|e| OssError::Parse(e.to_string()))?;
    for f in frames {
        let mut row = vec![f.id.clone(), f.batch.to_string(), f.loss.map(fmt_f64).unwrap_or_default()];
        row.extend(f.features.iter().map(|&v| fmt_f64(v)));
        w.write_record(&row).map_err(|e| OssError::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Groups frames by batch index, ascending. Frame order inside a batch is kept.
pub fn group_batches(frames: Vec<FrameRecord>) -> Vec<Vec<FrameRecord>> {
    let mut map: std::collections::BTreeMap<usize, Vec<FrameRecord>> = Default::default();
    for f in frames {
        map.entry(f.batch).or_default().push(f);
    }
    map.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SelectionInstance {
        SelectionInstance::new(
            Matrix::from_rows(vec![vec![0.3], vec![0.4]]).unwrap(),
            Matrix::from_rows(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap(),
            vec![0.7],
            vec![0.5, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn json_uses_17_digits() {
        let v = serde_json::json!({"b": [0.1, 2, -1.5], "a": "x\"y", "n": null});
        assert_eq!(to_json_17g(&v).unwrap(), r#"{"a":"x\"y","b":[0.10000000000000001,2,-1.5],"n":null}"#);
        let back: serde_json::Value = serde_json::from_str(&to_json_17g(&v).unwrap()).unwrap();
        assert_eq!(back["b"][0].as_f64(), Some(0.1));
    }

    #[test]
    fn q_at_rho_one_is_d() {
        let inst = tiny();
        let q = build_q(&inst, 1.0);
        assert_eq!(q.q_new, inst.d_new);
        assert_eq!(q.q_old, inst.d_old);
    }

    #[test]
    fn q_at_rho_zero_is_negative_loss() {
        let inst = tiny();
        let q = build_q(&inst, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(q.q_new.get(i, j), -inst.loss_new[j]);
            }
        }
    }

    #[test]
    fn q_direct_substitution() {
        // rho = 0.5, d = 2, L = 1 -> 0.5
        assert_eq!(build_q(&tiny(), 0.5).q_new.get(0, 1), 0.5);
    }

    #[test]
    fn validate_well_formed() {
        let inst = SelectionInstance {
            d_old: Matrix::from_rows(vec![vec![0.1], vec![0.2]]).unwrap(),
            d_new: Matrix::from_rows(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap(),
            loss_old: vec![0.0],
            loss_new: vec![0.1, 0.2],
        };
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn validate_reports_diagonal_and_loss() {
        let mut inst = tiny();
        inst.d_new.set(0, 0, 0.2);
        inst.loss_new[0] = -0.1;
        let msgs: Vec<String> = inst.validate().iter().map(ToString::to_string).collect();
        assert!(msgs.contains(&"nonzero diagonal at i=0".to_string()), "{msgs:?}");
        assert!(msgs.contains(&"negative loss at j=0".to_string()), "{msgs:?}");
        assert_eq!(msgs.len(), 2);
    }

    #[test]
    fn validate_reports_shape() {
        let mut inst = tiny();
        inst.loss_old.push(0.0);
        assert!(matches!(inst.validate()[0], Violation::Shape(_)));
    }

    #[test]
    fn json_cold_start_omits_old_block() {
        let inst = SelectionInstance::without_old(Matrix::zeros(1, 1), vec![0.25]).unwrap();
        let s = inst.to_json();
        assert_eq!(s, r#"{"d_new":[[0]],"loss_new":[0.25]}"#);
        assert_eq!(SelectionInstance::from_json(&s).unwrap(), inst);
    }

    #[test]
    fn dissimilarity_identical_vectors() {
        let a = vec![FrameRecord::new("a", 1, vec![1.0, 2.0]), FrameRecord::new("b", 1, vec![1.0, 2.0])];
        let d = dissimilarity_from_features(&a, &a).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dissimilarity_affine_rescale() {
        // distances {0, 1, 3} from the reference -> {0, 1/3, 1}
        let reference = vec![FrameRecord::new("r", 1, vec![0.0])];
        let others =
            vec![FrameRecord::new("a", 1, vec![0.0]), FrameRecord::new("b", 1, vec![1.0]), FrameRecord::new("c", 1, vec![3.0])];
        let d = dissimilarity_from_features(&others, &reference).unwrap();
        assert_eq!(d.get(0, 0), 0.0);
        assert!((d.get(1, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.get(2, 0), 1.0);
    }

    #[test]
    fn dissimilarity_same_list_symmetric() {
        let frames: Vec<_> = (0..5).map(|k| FrameRecord::new(format!("f{k}"), 1, vec![k as f64, (k * k) as f64])).collect();
        let d = dissimilarity_from_features(&frames, &frames).unwrap();
        assert!(d.is_symmetric(0.0));
        assert!((0..5).all(|i| d.get(i, i) == 0.0));
    }

    #[test]
    fn dissimilarity_errors() {
        let a = vec![FrameRecord::new("a", 1, vec![1.0])];
        let b = vec![FrameRecord::new("b", 1, vec![1.0, 2.0])];
        assert!(matches!(dissimilarity_from_features(&a, &b), Err(OssError::Dimension(_))));
        assert!(matches!(dissimilarity_from_features(&a, &[]), Err(OssError::Empty(_))));
    }

    #[test]
    fn shift_rule() {
        let mut l = vec![0.1, -0.2, 0.5];
        let s = shift_nonnegative(&mut l);
        assert_eq!(s, 0.2);
        assert!((l[0] - 0.3).abs() < 1e-15 && l[1] == 0.0);
        let mut ok = vec![0.0, 1.0];
        assert_eq!(shift_nonnegative(&mut ok), 0.0);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "0.10000000000000001");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(-2.5), "-2.5");
        assert_eq!(fmt_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_roundtrip() {
        let frames = vec![
            FrameRecord::new("a", 1, vec![0.5, 1.0]).with_loss(0.25),
            FrameRecord::new("b", 2, vec![0.1, -3.0]),
        ];
        let mut buf = Vec::new();
        write_stream_csv(&frames, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,batch,loss,f0,f1\n"));
        let back = read_stream_csv(text.as_bytes()).unwrap();
        assert_eq!(back, frames);
        assert_eq!(group_batches(back).len(), 2);
    }

    #[test]
    fn config_ranges() {
        assert!(SelectionConfig::default().validate().is_ok());
        let bad = SelectionConfig { rho: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SelectionConfig { epsilon: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
