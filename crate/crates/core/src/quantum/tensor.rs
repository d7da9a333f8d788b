/// Dense real tensor, row-major with mode 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl RealTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len(), "tensor data length");
        Self { shape, data }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn flat(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.shape.len(), "tensor index rank");
        index.iter().zip(&self.shape).fold(0, |acc, (&i, &m)| {
            assert!(i < m, "tensor index out of range");
            acc * m + i
        })
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.flat(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let i = self.flat(index);
        self.data[i] = value;
    }

    /// Multi-indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(move |mut f| {
            let mut idx = vec![0; self.shape.len()];
            for (slot, &m) in idx.iter_mut().zip(&self.shape).rev() {
                *slot = f % m;
                f /= m;
            }
            idx
        })
    }

    fn split(&self, mode: usize) -> (usize, usize, usize) {
        let outer = self.shape[..mode].iter().product();
        let inner = self.shape[mode + 1..].iter().product();
        (outer, self.shape[mode], inner)
    }

    /// Contracts `mode` with a `rows x cols` matrix (row-major, `rows` equal
    /// to the size of `mode`): `out[.., j, ..] = sum_i self[.., i, ..] m[i][j]`.
    pub fn mode_product(&self, mode: usize, matrix: &[f64], cols: usize) -> RealTensor {
        let (outer, dim, inner) = self.split(mode);
        assert_eq!(matrix.len(), dim * cols, "mode product matrix shape");
        let mut shape = self.shape.clone();
        shape[mode] = cols;
        let mut data = vec![0.0; outer * cols * inner];
        for o in 0..outer {
            for i in 0..dim {
                let src = &self.data[(o * dim + i) * inner..(o * dim + i + 1) * inner];
                for j in 0..cols {
                    let w = matrix[i * cols + j];
                    if w == 0.0 {
                        continue;
                    }
                    let dst = &mut data[(o * cols + j) * inner..(o * cols + j + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        RealTensor { shape, data }
    }

    /// `out[a][b] = sum over all other modes of self[.., a, ..] other[.., b, ..]`.
    /// Shapes must agree except at `mode`.
    pub fn contract_except(&self, other: &RealTensor, mode: usize) -> Vec<f64> {
        assert_eq!(self.shape.len(), other.shape.len(), "tensor rank");
        let (outer, da, inner) = self.split(mode);
        let (outer2, db, inner2) = other.split(mode);
        assert_eq!((outer, inner), (outer2, inner2), "tensor shapes");
        let mut out = vec![0.0; da * db];
        for o in 0..outer {
            for a in 0..da {
                let x = &self.data[(o * da + a) * inner..(o * da + a + 1) * inner];
                for b in 0..db {
                    let y = &other.data[(o * db + b) * inner..(o * db + b + 1) * inner];
                    out[a * db + b] += x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
                }
            }
        }
        out
    }

    pub fn dot(&self, other: &RealTensor) -> f64 {
        assert_eq!(self.shape, other.shape, "tensor shapes");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}
