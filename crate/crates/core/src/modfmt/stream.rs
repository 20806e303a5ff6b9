use num_complex::Complex64;

/// Sequence of 4D time slots `(x_re, x_im, y_re, y_im)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol4DStream {
    slots: Vec<[f64; 4]>,
}

impl Symbol4DStream {
    pub fn new(slots: Vec<[f64; 4]>) -> Self {
        Symbol4DStream { slots }
    }

    pub fn from_polarisations(x: &[Complex64], y: &[Complex64]) -> Self {
        assert_eq!(x.len(), y.len());
        Symbol4DStream {
            slots: x.iter().zip(y).map(|(a, b)| [a.re, a.im, b.re, b.im]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[[f64; 4]] {
        &self.slots
    }

    pub fn x(&self) -> Vec<Complex64> {
        self.slots.iter().map(|s| Complex64::new(s[0], s[1])).collect()
    }

    pub fn y(&self) -> Vec<Complex64> {
        self.slots.iter().map(|s| Complex64::new(s[2], s[3])).collect()
    }

    pub fn mean_energy(&self) -> f64 {
        let total: f64 = self.slots.iter().flat_map(|s| s.iter()).map(|v| v * v).sum();
        total / self.slots.len().max(1) as f64
    }
}
