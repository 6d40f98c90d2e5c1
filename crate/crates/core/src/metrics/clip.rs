use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    Image,
    Text,
}

/// A vision-language embedding of one image or one prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    vector: Vec<f64>,
    kind: EmbeddingKind,
    id: String,
}

impl Embedding {
    pub fn new(id: impl Into<String>, kind: EmbeddingKind, vector: Vec<f64>) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidEmbedding("zero-dimensional vector".into()));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidEmbedding("non-finite component".into()));
        }
        Ok(Self { vector, kind, id: id.into() })
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn id(&self) -> &str {
        &self.id
    }
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("embedding dims {} vs {}", a.len(), b.len())));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateEmbedding);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

fn check_pair(img: &Embedding, txt: &Embedding) -> Result<()> {
    if img.kind != EmbeddingKind::Image {
        return Err(Error::InvalidEmbedding(format!("{} is not an image embedding", img.id)));
    }
    if txt.kind != EmbeddingKind::Text {
        return Err(Error::InvalidEmbedding(format!("{} is not a text embedding", txt.id)));
    }
    Ok(())
}

/// `100 · cos(image, text)`; embeddings need not be normalized.
pub fn clip_score(img: &Embedding, txt: &Embedding) -> Result<f64> {
    check_pair(img, txt)?;
    Ok(100.0 * cosine_similarity(&img.vector, &txt.vector)?)
}

/// Text-alignment loss `1 − cos(image, text)`, in `[0, 2]`.
pub fn clip_loss(img: &Embedding, txt: &Embedding) -> Result<f64> {
    Ok(1.0 - clip_score(img, txt)? / 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(v: Vec<f64>) -> Embedding {
        Embedding::new("i", EmbeddingKind::Image, v).unwrap()
    }

    fn txt(v: Vec<f64>) -> Embedding {
        Embedding::new("t", EmbeddingKind::Text, v).unwrap()
    }

    #[test]
    fn score_reference_values() {
        assert_eq!(clip_score(&img(vec![1.0, 0.0]), &txt(vec![1.0, 0.0])).unwrap(), 100.0);
        assert_eq!(clip_score(&img(vec![1.0, 0.0]), &txt(vec![0.0, 1.0])).unwrap(), 0.0);
        let v = vec![0.3, -1.2, 2.0];
        let s = clip_score(&img(v.clone()), &txt(v.iter().map(|x| 3.0 * x).collect())).unwrap();
        assert!((s - 100.0).abs() < 1e-12);
    }

    #[test]
    fn loss_reference_values() {
        assert!(clip_loss(&img(vec![2.0, 1.0]), &txt(vec![2.0, 1.0])).unwrap().abs() < 1e-12);
        assert_eq!(clip_loss(&img(vec![1.0, 0.0]), &txt(vec![0.0, 5.0])).unwrap(), 1.0);
        assert!((clip_loss(&img(vec![1.0, 1.0]), &txt(vec![-1.0, -1.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            clip_score(&img(vec![0.0, 0.0]), &txt(vec![1.0, 0.0])),
            Err(Error::DegenerateEmbedding)
        ));
        assert!(matches!(
            clip_score(&img(vec![1.0]), &txt(vec![1.0, 0.0])),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            clip_score(&txt(vec![1.0]), &txt(vec![1.0])),
            Err(Error::InvalidEmbedding(_))
        ));
        assert!(Embedding::new("x", EmbeddingKind::Text, vec![]).is_err());
        assert!(Embedding::new("x", EmbeddingKind::Text, vec![f64::NAN]).is_err());
    }
}
