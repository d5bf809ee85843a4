//! Amplitude vectors over the product basis, real when the circuit is real.

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub enum StateVector {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl StateVector {
    pub fn zeros_like(&self) -> StateVector {
        match self {
            StateVector::Real(v) => StateVector::Real(vec![0.0; v.len()]),
            StateVector::Complex(v) => StateVector::Complex(vec![Complex64::default(); v.len()]),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StateVector::Real(v) => v.len(),
            StateVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_real(&self) -> bool {
        matches!(self, StateVector::Real(_))
    }

    pub fn get(&self, i: usize) -> Complex64 {
        match self {
            StateVector::Real(v) => Complex64::new(v[i], 0.0),
            StateVector::Complex(v) => v[i],
        }
    }

    pub fn abs2(&self, i: usize) -> f64 {
        match self {
            StateVector::Real(v) => v[i] * v[i],
            StateVector::Complex(v) => v[i].norm_sqr(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            StateVector::Real(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            StateVector::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n == 0.0 {
            return;
        }
        match self {
            StateVector::Real(v) => v.iter_mut().for_each(|x| *x /= n),
            StateVector::Complex(v) => v.iter_mut().for_each(|z| *z /= n),
        }
    }

    /// <self, other> with the left argument conjugated.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.len(), other.len());
        match (self, other) {
            (StateVector::Real(a), StateVector::Real(b)) => Complex64::new(
                a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>(),
                0.0,
            ),
            _ => {
                let mut s = Complex64::default();
                for i in 0..self.len() {
                    s += self.get(i).conj() * other.get(i);
                }
                s
            }
        }
    }

    /// Collapse a complex vector whose imaginary parts vanish.
    pub fn demote_if_real(self) -> StateVector {
        match self {
            StateVector::Complex(v) => {
                if v.iter().all(|z| z.im.abs() <= 1e-14) {
                    StateVector::Real(v.into_iter().map(|z| z.re).collect())
                } else {
                    StateVector::Complex(v)
                }
            }
            real => real,
        }
    }
}
