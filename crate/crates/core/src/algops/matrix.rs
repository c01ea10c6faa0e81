/// Commutative ring with exact division, enough for fraction-free elimination.
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `self / o` when the division is exact.
    fn div_exact(&self, o: &Self) -> Option<Self>;
}

/// Square matrix over a [`Ring`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<R> {
    n: usize,
    a: Vec<R>,
}

impl<R: Ring> PolyMatrix<R> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        PolyMatrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.a[i * self.n + j]
    }

    /// Cofactor expansion for small matrices, Bareiss elimination otherwise.
    pub fn det(&self) -> R {
        if self.n <= 4 {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    pub fn det_cofactor(&self) -> R {
        let cols: Vec<usize> = (0..self.n).collect();
        self.minor(0, &cols)
    }

    fn minor(&self, row: usize, cols: &[usize]) -> R {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = self.get(0, 0).zero_like();
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = e.mul(&self.minor(row + 1, &rest));
            acc = if k % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc
    }

    /// Fraction-free Gaussian elimination; every division is exact.
    pub fn det_bareiss(&self) -> R {
        let n = self.n;
        if n == 0 {
            return self.a.first().map(|x| x.one_like()).expect("empty matrix");
        }
        let mut m: Vec<Vec<R>> = (0..n).map(|i| self.a[i * n..(i + 1) * n].to_vec()).collect();
        let mut negate = false;
        let mut prev = m[0][0].one_like();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        negate = !negate;
                    }
                    None => return m[0][0].zero_like(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            d.zero_like().sub(&d)
        } else {
            d
        }
    }
}
