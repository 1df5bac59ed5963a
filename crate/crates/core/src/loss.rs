//! Identification-branch loss kernels over appearance embeddings: hinge
//! triplet loss, linear-softmax classification loss, and their batch
//! combination — all pure functions returning analytic gradients.

use crate::error::{Error, Result};

/// Nominal embedding width used throughout the pipeline.
pub const DEFAULT_EMBEDDING_DIM: usize = 256;

/// Dense real-valued appearance descriptor. Components are validated finite
/// at construction, so downstream arithmetic never meets NaN/∞ inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig(
                "embedding dimension must be >= 1".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding component"));
        }
        Ok(Embedding { values })
    }

    pub fn zeros(dim: usize) -> Self {
        Embedding {
            values: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Convex blend `alpha·self + (1−alpha)·other` (exponential-moving-average
    /// step for track embeddings).
    pub fn blend(&self, other: &Embedding, alpha: f64) -> Result<Embedding> {
        check_dims(self, other)?;
        if !alpha.is_finite() {
            return Err(Error::NonFinite("blend factor"));
        }
        Embedding::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        )
    }
}

fn check_dims(a: &Embedding, b: &Embedding) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "embedding dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Squared Euclidean distance between two embeddings.
pub fn embedding_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    check_dims(a, b)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

/// Cosine distance `1 − cos(a, b)`, clamped to `[0, 1]` so a unit distance
/// means "as far as allowed" in association costs. Conventions for degenerate
/// inputs: both zero vectors → 0 (indistinguishable), exactly one zero → 1
/// (maximally far).
pub fn cosine_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    check_dims(a, b)?;
    let na = a.l2_norm();
    let nb = b.l2_norm();
    if na == 0.0 && nb == 0.0 {
        return Ok(0.0);
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(1.0);
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok((1.0 - dot / (na * nb)).clamp(0.0, 1.0))
}

/// Margin and normalization options for the triplet loss.
#[derive(Debug, Clone, Copy)]
pub struct TripletConfig {
    /// Bound margin between the positive and negative squared distances.
    pub margin: f64,
    /// Unit-normalize inputs before measuring distances (gradients are then
    /// chained through the normalization).
    pub normalize: bool,
}

impl Default for TripletConfig {
    fn default() -> Self {
        TripletConfig {
            margin: 0.3,
            normalize: false,
        }
    }
}

impl TripletConfig {
    fn validate(&self) -> Result<()> {
        if !self.margin.is_finite() || self.margin < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "triplet margin {} must be finite and >= 0",
                self.margin
            )));
        }
        Ok(())
    }
}

/// Loss value and analytic gradients with respect to the three inputs.
#[derive(Debug, Clone)]
pub struct TripletResult {
    pub loss: f64,
    pub grad_anchor: Embedding,
    pub grad_positive: Embedding,
    pub grad_negative: Embedding,
}

/// Hinge triplet loss
/// `max(‖a − p‖² − ‖a − n‖² + margin, 0)` with squared Euclidean distances.
/// Gradients are exact subgradients: zero everywhere when the hinge is
/// inactive (the expression above is ≤ 0).
pub fn triplet_loss(
    anchor: &Embedding,
    positive: &Embedding,
    negative: &Embedding,
    cfg: &TripletConfig,
) -> Result<TripletResult> {
    cfg.validate()?;
    check_dims(anchor, positive)?;
    check_dims(anchor, negative)?;
    let dim = anchor.dim();

    // Optionally work on unit-normalized copies.
    let (a, p, n) = if cfg.normalize {
        (
            normalized(anchor)?,
            normalized(positive)?,
            normalized(negative)?,
        )
    } else {
        (anchor.clone(), positive.clone(), negative.clone())
    };

    let d_ap = embedding_distance(&a, &p)?;
    let d_an = embedding_distance(&a, &n)?;
    let raw = d_ap - d_an + cfg.margin;
    if raw <= 0.0 {
        return Ok(TripletResult {
            loss: 0.0,
            grad_anchor: Embedding::zeros(dim),
            grad_positive: Embedding::zeros(dim),
            grad_negative: Embedding::zeros(dim),
        });
    }

    // d(‖a−p‖² − ‖a−n‖²)/da = 2(n − p); d/dp = −2(a − p); d/dn = 2(a − n).
    let ga: Vec<f64> = (0..dim)
        .map(|i| 2.0 * (n.values[i] - p.values[i]))
        .collect();
    let gp: Vec<f64> = (0..dim)
        .map(|i| -2.0 * (a.values[i] - p.values[i]))
        .collect();
    let gn: Vec<f64> = (0..dim)
        .map(|i| 2.0 * (a.values[i] - n.values[i]))
        .collect();

    let (ga, gp, gn) = if cfg.normalize {
        (
            chain_through_normalization(anchor, &a, &ga),
            chain_through_normalization(positive, &p, &gp),
            chain_through_normalization(negative, &n, &gn),
        )
    } else {
        (ga, gp, gn)
    };

    Ok(TripletResult {
        loss: raw,
        grad_anchor: Embedding::new(ga)?,
        grad_positive: Embedding::new(gp)?,
        grad_negative: Embedding::new(gn)?,
    })
}

fn normalized(e: &Embedding) -> Result<Embedding> {
    let norm = e.l2_norm();
    if norm == 0.0 {
        return Err(Error::NonFinite("normalization of a zero embedding"));
    }
    Embedding::new(e.values.iter().map(|v| v / norm).collect())
}

/// Pulls a gradient w.r.t. the unit vector x̂ back to the raw vector x using
/// the Jacobian (I − x̂x̂ᵀ)/‖x‖.
fn chain_through_normalization(raw: &Embedding, unit: &Embedding, grad_unit: &[f64]) -> Vec<f64> {
    let norm = raw.l2_norm();
    let dot: f64 = unit.values.iter().zip(grad_unit).map(|(u, g)| u * g).sum();
    unit.values
        .iter()
        .zip(grad_unit)
        .map(|(u, g)| (g - dot * u) / norm)
        .collect()
}

/// Nonnegative class label: 0 is background, positive values are instance ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct IdLabel(pub u32);

/// Linear multi-class scorer: `num_classes` rows of `dim` weights, class 0
/// reserved for background.
#[derive(Debug, Clone)]
pub struct LinearClassifier {
    num_classes: usize,
    dim: usize,
    /// Row-major `num_classes × dim`.
    weights: Vec<f64>,
}

impl LinearClassifier {
    pub fn zeros(num_classes: usize, dim: usize) -> Result<Self> {
        if num_classes == 0 || dim == 0 {
            return Err(Error::InvalidConfig(
                "classifier needs >= 1 class and dim >= 1".into(),
            ));
        }
        Ok(LinearClassifier {
            num_classes,
            dim,
            weights: vec![0.0; num_classes * dim],
        })
    }

    pub fn from_weights(num_classes: usize, dim: usize, weights: Vec<f64>) -> Result<Self> {
        if num_classes == 0 || dim == 0 || weights.len() != num_classes * dim {
            return Err(Error::InvalidConfig(format!(
                "weight count {} does not equal {num_classes}x{dim}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("classifier weight"));
        }
        Ok(LinearClassifier {
            num_classes,
            dim,
            weights,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn row(&self, c: usize) -> &[f64] {
        &self.weights[c * self.dim..(c + 1) * self.dim]
    }

    /// Raw linear scores `W·e`, one per class.
    pub fn scores(&self, e: &Embedding) -> Result<Vec<f64>> {
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "embedding dim {} vs classifier dim {}",
                e.dim(),
                self.dim
            )));
        }
        Ok((0..self.num_classes)
            .map(|c| {
                self.row(c)
                    .iter()
                    .zip(e.as_slice())
                    .map(|(w, x)| w * x)
                    .sum()
            })
            .collect())
    }
}

/// Loss value plus analytic gradients w.r.t. the embedding and every weight.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub loss: f64,
    pub grad_embedding: Embedding,
    /// Row-major `num_classes × dim`, aligned with [`LinearClassifier::weights`].
    pub grad_weights: Vec<f64>,
}

/// Cross-entropy of the softmax over linear class scores against an id label.
/// Numerically stabilized with the log-sum-exp shift.
pub fn classification_loss(
    embedding: &Embedding,
    classifier: &LinearClassifier,
    label: IdLabel,
) -> Result<ClassificationResult> {
    let c = label.0 as usize;
    if c >= classifier.num_classes {
        return Err(Error::LabelOutOfRange {
            label: label.0,
            num_classes: classifier.num_classes,
        });
    }
    let scores = classifier.scores(embedding)?;
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum_exp: f64 = scores.iter().map(|s| (s - max).exp()).sum();
    let lse = max + sum_exp.ln();
    let loss = lse - scores[c];

    // Softmax minus one-hot in score space, pushed through the linear layer.
    let dim = classifier.dim;
    let mut grad_embedding = vec![0.0; dim];
    let mut grad_weights = vec![0.0; classifier.num_classes * dim];
    for (class, &s) in scores.iter().enumerate() {
        let q = (s - lse).exp();
        let delta = q - if class == c { 1.0 } else { 0.0 };
        let row = classifier.row(class);
        for i in 0..dim {
            grad_embedding[i] += delta * row[i];
            grad_weights[class * dim + i] = delta * embedding.as_slice()[i];
        }
    }
    Ok(ClassificationResult {
        loss,
        grad_embedding: Embedding::new(grad_embedding)?,
        grad_weights,
    })
}

/// Batch identification loss: mean triplet loss plus mean classification loss.
pub fn id_loss(
    triplets: &[(Embedding, Embedding, Embedding)],
    classifications: &[(Embedding, IdLabel)],
    classifier: &LinearClassifier,
    cfg: &TripletConfig,
) -> Result<f64> {
    if triplets.is_empty() || classifications.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut tri_sum = 0.0;
    for (a, p, n) in triplets {
        tri_sum += triplet_loss(a, p, n, cfg)?.loss;
    }
    let mut cls_sum = 0.0;
    for (e, label) in classifications {
        cls_sum += classification_loss(e, classifier, *label)?.loss;
    }
    Ok(tri_sum / triplets.len() as f64 + cls_sum / classifications.len() as f64)
}
