use std::collections::HashMap;
use std::rc::Rc;

/// `exp(-gamma * |u - v|^2)`.
pub fn rbf(u: &[f64], v: &[f64], gamma: f64) -> f64 {
    let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

/// Row cache for the RBF Gram matrix of a training set, evicting the least
/// recently used row once the byte budget is exceeded.
pub struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    gamma: f64,
    budget_rows: usize,
    rows: HashMap<usize, (Rc<Vec<f64>>, u64)>,
    clock: u64,
    pub(crate) computed: usize,
}

impl<'a> KernelCache<'a> {
    pub fn new(x: &'a [Vec<f64>], gamma: f64, budget_bytes: usize) -> Self {
        let row_bytes = (x.len() * std::mem::size_of::<f64>()).max(1);
        KernelCache {
            x,
            gamma,
            budget_rows: (budget_bytes / row_bytes).max(2),
            rows: HashMap::new(),
            clock: 0,
            computed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn row(&mut self, i: usize) -> Rc<Vec<f64>> {
        self.clock += 1;
        let now = self.clock;
        if let Some((row, stamp)) = self.rows.get_mut(&i) {
            *stamp = now;
            return Rc::clone(row);
        }
        if self.rows.len() >= self.budget_rows {
            if let Some(&oldest) = self
                .rows
                .iter()
                .min_by_key(|(_, (_, stamp))| *stamp)
                .map(|(k, _)| k)
            {
                self.rows.remove(&oldest);
            }
        }
        let xi = &self.x[i];
        let row: Rc<Vec<f64>> = Rc::new(self.x.iter().map(|xj| rbf(xi, xj, self.gamma)).collect());
        self.computed += 1;
        self.rows.insert(i, (Rc::clone(&row), now));
        row
    }
}
