use crate::error::{Error, Result};
use crate::quadrature::UnitRule;

pub const DEFAULT_ELEMENTS: usize = 64;
pub const DEFAULT_QUADRATURE_ORDER: usize = 5;

/// Partition of the half interval `[0, 1]`; the mirrored half is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    quadrature_order: usize,
    rule: UnitRule,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, quadrature_order: usize) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::BadGrid("need at least one element".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::BadGrid("nodes must start at 0 and end at 1".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadGrid("nodes must be strictly increasing".into()));
        }
        if quadrature_order < 3 {
            return Err(Error::BadGrid(format!(
                "quadrature order {quadrature_order} below the minimum of 3"
            )));
        }
        Ok(Self {
            nodes,
            quadrature_order,
            rule: UnitRule::new(quadrature_order),
        })
    }

    pub fn uniform(n_elements: usize, quadrature_order: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::BadGrid("need at least one element".into()));
        }
        let mut nodes: Vec<f64> = (0..=n_elements)
            .map(|i| i as f64 / n_elements as f64)
            .collect();
        nodes[n_elements] = 1.0;
        Self::new(nodes, quadrature_order)
    }

    /// Grid whose last `graded` elements shrink geometrically by `ratio`
    /// towards `x = 1`; the remaining elements share one width.
    pub fn graded(
        n_elements: usize,
        quadrature_order: usize,
        ratio: f64,
        graded: usize,
    ) -> Result<Self> {
        if n_elements == 0 || !(ratio >= 1.0) {
            return Err(Error::BadGrid("graded grid needs n >= 1 and ratio >= 1".into()));
        }
        let graded = graded.min(n_elements);
        let flat = n_elements - graded;
        let widths: Vec<f64> = (0..n_elements)
            .map(|i| {
                if i < flat {
                    1.0
                } else {
                    ratio.powi(-((i - flat + 1) as i32))
                }
            })
            .collect();
        let total: f64 = widths.iter().sum();
        let mut nodes = Vec::with_capacity(n_elements + 1);
        let mut acc = 0.0;
        nodes.push(0.0);
        for w in &widths[..n_elements - 1] {
            acc += w / total;
            nodes.push(acc);
        }
        nodes.push(1.0);
        Self::new(nodes, quadrature_order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    pub fn rule(&self) -> &UnitRule {
        &self.rule
    }

    pub fn width(&self, element: usize) -> f64 {
        self.nodes[element + 1] - self.nodes[element]
    }

    /// Element containing `y` in `[0, 1]`; the right end belongs to the last element.
    pub fn element_of(&self, y: f64) -> usize {
        let n = self.n_elements();
        match self.nodes.binary_search_by(|x| x.total_cmp(&y)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Same grid with every element split in two.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(1.0);
        Self::new(nodes, self.quadrature_order).expect("refinement preserves validity")
    }

    /// Grid with the points `xs` added as nodes. Points closer than `snap`
    /// to an existing node are merged into it.
    pub fn with_nodes(&self, xs: &[f64], snap: f64) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        for &x in xs {
            if !(x > 0.0 && x < 1.0) {
                continue;
            }
            if nodes.iter().all(|&n| (n - x).abs() > snap) {
                nodes.push(x);
            }
        }
        nodes.sort_by(f64::total_cmp);
        Self::new(nodes, self.quadrature_order)
    }

    /// Index of the node equal to `x` within `snap`, if any.
    pub fn node_index(&self, x: f64, snap: f64) -> Option<usize> {
        self.nodes.iter().position(|&n| (n - x).abs() <= snap)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::uniform(DEFAULT_ELEMENTS, DEFAULT_QUADRATURE_ORDER).unwrap()
    }
}
