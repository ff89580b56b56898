use std::collections::HashMap;

use ndarray::{Array2, Axis};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    MulElem(usize, usize),
    MinElem(usize, usize),
    MaxElem(usize, usize),
    MatMul(usize, usize),
    AddBroadcastRow(usize, usize),
    Scale(usize, f64),
    AddScalar(usize),
    Clamp(usize, f64, f64),
    Tanh(usize),
    Relu(usize),
    Sigmoid(usize),
    Exp(usize),
    Ln(usize),
    SoftmaxRows(usize),
    LogSoftmaxRows(usize),
    SumAll(usize),
    MeanAll(usize),
    MeanRows(usize),
    SegmentMeanRows(usize, Vec<(usize, usize)>),
    ConcatCols(usize, usize),
    ConcatRows(usize, usize),
    Rows(usize, Vec<usize>),
    Transpose(usize),
    PickEntries(usize, Vec<(usize, usize)>),
    BceWithLogits(usize, Array2<f64>),
}

struct Node {
    value: Array2<f64>,
    op: Op,
    param: Option<String>,
}

/// Reverse-mode autodiff tape over `f64` matrices. Forward values are
/// computed eagerly as nodes are added; `backward` walks the tape in
/// reverse, accumulating gradients for every node.
#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> Var {
        assert!(
            value.iter().all(|v| v.is_finite()),
            "non-finite value produced by {op:?}"
        );
        self.nodes.push(Node {
            value,
            op,
            param: None,
        });
        Var(self.nodes.len() - 1)
    }

    /// Value of a node.
    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    /// Scalar value of a 1x1 node.
    pub fn scalar(&self, v: Var) -> f64 {
        let val = &self.nodes[v.0].value;
        assert_eq!(val.dim(), (1, 1), "scalar() on non-scalar node");
        val[(0, 0)]
    }

    /// Constant leaf: participates in forward, receives no parameter grad.
    pub fn constant(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    /// Named parameter leaf; its gradient is collected by `grads`.
    pub fn param(&mut self, name: &str, value: Array2<f64>) -> Var {
        let v = self.push(value, Op::Leaf);
        self.nodes[v.0].param = Some(name.to_string());
        v
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.dim(), vb.dim(), "add: shape mismatch");
        let out = va + vb;
        self.push(out, Op::Add(a.0, b.0))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.dim(), vb.dim(), "sub: shape mismatch");
        let out = va - vb;
        self.push(out, Op::Sub(a.0, b.0))
    }

    pub fn mul_elem(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.dim(), vb.dim(), "mul_elem: shape mismatch");
        let out = va * vb;
        self.push(out, Op::MulElem(a.0, b.0))
    }

    pub fn min_elem(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.dim(), vb.dim(), "min_elem: shape mismatch");
        let mut out = va.clone();
        out.zip_mut_with(vb, |x, &y| *x = x.min(y));
        self.push(out, Op::MinElem(a.0, b.0))
    }

    pub fn max_elem(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.dim(), vb.dim(), "max_elem: shape mismatch");
        let mut out = va.clone();
        out.zip_mut_with(vb, |x, &y| *x = x.max(y));
        self.push(out, Op::MaxElem(a.0, b.0))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.ncols(), vb.nrows(), "matmul: inner dim mismatch");
        let out = va.dot(vb);
        self.push(out, Op::MatMul(a.0, b.0))
    }

    /// Adds a (1, d) row vector to every row of a (n, d) matrix.
    pub fn add_broadcast_row(&mut self, a: Var, row: Var) -> Var {
        let (va, vr) = (&self.nodes[a.0].value, &self.nodes[row.0].value);
        assert_eq!(vr.nrows(), 1, "add_broadcast_row: row operand not 1xd");
        assert_eq!(va.ncols(), vr.ncols(), "add_broadcast_row: width mismatch");
        let out = va + vr;
        self.push(out, Op::AddBroadcastRow(a.0, row.0))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let out = &self.nodes[a.0].value * c;
        self.push(out, Op::Scale(a.0, c))
    }

    pub fn add_scalar(&mut self, a: Var, c: f64) -> Var {
        let out = &self.nodes[a.0].value + c;
        self.push(out, Op::AddScalar(a.0))
    }

    /// Elementwise clamp; gradient flows only strictly inside the bounds.
    pub fn clamp(&mut self, a: Var, lo: f64, hi: f64) -> Var {
        let out = self.nodes[a.0].value.mapv(|x| x.clamp(lo, hi));
        self.push(out, Op::Clamp(a.0, lo, hi))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.mapv(f64::tanh);
        self.push(out, Op::Tanh(a.0))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.mapv(|x| x.max(0.0));
        self.push(out, Op::Relu(a.0))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.mapv(|x| 1.0 / (1.0 + (-x).exp()));
        self.push(out, Op::Sigmoid(a.0))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.mapv(f64::exp);
        self.push(out, Op::Exp(a.0))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.mapv(f64::ln);
        self.push(out, Op::Ln(a.0))
    }

    /// Row-wise softmax with max subtraction.
    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let v = &self.nodes[a.0].value;
        let mut out = v.clone();
        for mut row in out.rows_mut() {
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            row.mapv_inplace(|x| (x - max).exp());
            let sum: f64 = row.sum();
            row.mapv_inplace(|x| x / sum);
        }
        self.push(out, Op::SoftmaxRows(a.0))
    }

    /// Row-wise log-softmax with max subtraction.
    pub fn log_softmax_rows(&mut self, a: Var) -> Var {
        let v = &self.nodes[a.0].value;
        let mut out = v.clone();
        for mut row in out.rows_mut() {
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let log_sum = row.iter().map(|x| (x - max).exp()).sum::<f64>().ln() + max;
            row.mapv_inplace(|x| x - log_sum);
        }
        self.push(out, Op::LogSoftmaxRows(a.0))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let s = self.nodes[a.0].value.sum();
        self.push(Array2::from_elem((1, 1), s), Op::SumAll(a.0))
    }

    pub fn mean_all(&mut self, a: Var) -> Var {
        let v = &self.nodes[a.0].value;
        let s = v.sum() / v.len() as f64;
        self.push(Array2::from_elem((1, 1), s), Op::MeanAll(a.0))
    }

    /// Mean over all rows, producing a (1, d) vector.
    pub fn mean_rows(&mut self, a: Var) -> Var {
        let v = &self.nodes[a.0].value;
        let out = v
            .mean_axis(Axis(0))
            .expect("mean_rows on empty matrix")
            .insert_axis(Axis(0));
        self.push(out, Op::MeanRows(a.0))
    }

    /// Per-segment row means: output row i is the mean of rows
    /// `segments[i].0..segments[i].1`. Segments may overlap.
    pub fn segment_mean_rows(&mut self, a: Var, segments: Vec<(usize, usize)>) -> Var {
        let v = &self.nodes[a.0].value;
        let d = v.ncols();
        let mut out = Array2::zeros((segments.len(), d));
        for (i, &(s, e)) in segments.iter().enumerate() {
            assert!(s < e && e <= v.nrows(), "segment_mean_rows: bad segment");
            let len = (e - s) as f64;
            for r in s..e {
                for c in 0..d {
                    out[(i, c)] += v[(r, c)] / len;
                }
            }
        }
        self.push(out, Op::SegmentMeanRows(a.0, segments))
    }

    pub fn concat_cols(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.nrows(), vb.nrows(), "concat_cols: row mismatch");
        let mut out = Array2::zeros((va.nrows(), va.ncols() + vb.ncols()));
        out.slice_mut(ndarray::s![.., ..va.ncols()]).assign(va);
        out.slice_mut(ndarray::s![.., va.ncols()..]).assign(vb);
        self.push(out, Op::ConcatCols(a.0, b.0))
    }

    pub fn concat_rows(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        assert_eq!(va.ncols(), vb.ncols(), "concat_rows: col mismatch");
        let mut out = Array2::zeros((va.nrows() + vb.nrows(), va.ncols()));
        out.slice_mut(ndarray::s![..va.nrows(), ..]).assign(va);
        out.slice_mut(ndarray::s![va.nrows().., ..]).assign(vb);
        self.push(out, Op::ConcatRows(a.0, b.0))
    }

    /// Gathers rows by index; an index may repeat.
    pub fn rows(&mut self, a: Var, indices: Vec<usize>) -> Var {
        let v = &self.nodes[a.0].value;
        let mut out = Array2::zeros((indices.len(), v.ncols()));
        for (i, &r) in indices.iter().enumerate() {
            assert!(r < v.nrows(), "rows: index out of range");
            out.row_mut(i).assign(&v.row(r));
        }
        self.push(out, Op::Rows(a.0, indices))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let out = self.nodes[a.0].value.t().to_owned();
        self.push(out, Op::Transpose(a.0))
    }

    /// Picks entries (r, c) into a (k, 1) column.
    pub fn pick_entries(&mut self, a: Var, entries: Vec<(usize, usize)>) -> Var {
        let v = &self.nodes[a.0].value;
        let mut out = Array2::zeros((entries.len(), 1));
        for (i, &(r, c)) in entries.iter().enumerate() {
            assert!(r < v.nrows() && c < v.ncols(), "pick_entries: out of range");
            out[(i, 0)] = v[(r, c)];
        }
        self.push(out, Op::PickEntries(a.0, entries))
    }

    /// Mean binary cross-entropy between logits and constant targets,
    /// computed with the numerically stable formulation.
    pub fn bce_with_logits(&mut self, logits: Var, targets: Array2<f64>) -> Var {
        let z = &self.nodes[logits.0].value;
        assert_eq!(z.dim(), targets.dim(), "bce_with_logits: shape mismatch");
        let mut total = 0.0;
        for (zi, ti) in z.iter().zip(targets.iter()) {
            total += zi.max(0.0) - zi * ti + (1.0 + (-zi.abs()).exp()).ln();
        }
        let mean = total / z.len() as f64;
        self.push(
            Array2::from_elem((1, 1), mean),
            Op::BceWithLogits(logits.0, targets),
        )
    }

    /// Runs reverse-mode accumulation from `output`, which must be 1x1.
    /// Returns the gradient of every named parameter leaf.
    pub fn backward(&mut self, output: Var) -> HashMap<String, Array2<f64>> {
        assert_eq!(
            self.nodes[output.0].value.dim(),
            (1, 1),
            "backward: output must be scalar"
        );
        let mut grads: Vec<Array2<f64>> = self
            .nodes
            .iter()
            .map(|n| Array2::zeros(n.value.dim()))
            .collect();
        grads[output.0][(0, 0)] = 1.0;

        for i in (0..=output.0).rev() {
            let g = grads[i].clone();
            if g.iter().all(|&x| x == 0.0) {
                continue;
            }
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    grads[*a] += &g;
                    grads[*b] += &g;
                }
                Op::Sub(a, b) => {
                    grads[*a] += &g;
                    grads[*b] -= &g;
                }
                Op::MulElem(a, b) => {
                    let (a, b) = (*a, *b);
                    let ga = &g * &self.nodes[b].value;
                    let gb = &g * &self.nodes[a].value;
                    grads[a] += &ga;
                    grads[b] += &gb;
                }
                Op::MinElem(a, b) | Op::MaxElem(a, b) => {
                    let (a, b) = (*a, *b);
                    let take_a = {
                        let va = &self.nodes[a].value;
                        let vb = &self.nodes[b].value;
                        let is_min = matches!(self.nodes[i].op, Op::MinElem(..));
                        let mut mask = va.clone();
                        mask.zip_mut_with(vb, |x, &y| {
                            let pick_a = if is_min { *x <= y } else { *x >= y };
                            *x = if pick_a { 1.0 } else { 0.0 };
                        });
                        mask
                    };
                    let ga = &g * &take_a;
                    let gb = &g * &(1.0 - &take_a);
                    grads[a] += &ga;
                    grads[b] += &gb;
                }
                Op::MatMul(a, b) => {
                    let (a, b) = (*a, *b);
                    let ga = g.dot(&self.nodes[b].value.t());
                    let gb = self.nodes[a].value.t().dot(&g);
                    grads[a] += &ga;
                    grads[b] += &gb;
                }
                Op::AddBroadcastRow(a, r) => {
                    let (a, r) = (*a, *r);
                    grads[a] += &g;
                    let row_sum = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                    grads[r] += &row_sum;
                }
                Op::Scale(a, c) => {
                    let ga = &g * *c;
                    grads[*a] += &ga;
                }
                Op::AddScalar(a) => {
                    grads[*a] += &g;
                }
                Op::Clamp(a, lo, hi) => {
                    let a = *a;
                    let (lo, hi) = (*lo, *hi);
                    let mask = self.nodes[a].value.mapv(|x| f64::from(u8::from(x > lo && x < hi)));
                    let ga = &g * &mask;
                    grads[a] += &ga;
                }
                Op::Tanh(a) => {
                    let y = &self.nodes[i].value;
                    let ga = &g * &y.mapv(|t| 1.0 - t * t);
                    grads[*a] += &ga;
                }
                Op::Relu(a) => {
                    let mask = self.nodes[*a].value.mapv(|x| f64::from(u8::from(x > 0.0)));
                    let ga = &g * &mask;
                    grads[*a] += &ga;
                }
                Op::Sigmoid(a) => {
                    let y = &self.nodes[i].value;
                    let ga = &g * &y.mapv(|s| s * (1.0 - s));
                    grads[*a] += &ga;
                }
                Op::Exp(a) => {
                    let ga = &g * &self.nodes[i].value;
                    grads[*a] += &ga;
                }
                Op::Ln(a) => {
                    let ga = &g / &self.nodes[*a].value;
                    grads[*a] += &ga;
                }
                Op::SoftmaxRows(a) => {
                    let y = &self.nodes[i].value;
                    let mut ga = Array2::zeros(y.dim());
                    for r in 0..y.nrows() {
                        let dot: f64 = (0..y.ncols()).map(|c| g[(r, c)] * y[(r, c)]).sum();
                        for c in 0..y.ncols() {
                            ga[(r, c)] = y[(r, c)] * (g[(r, c)] - dot);
                        }
                    }
                    grads[*a] += &ga;
                }
                Op::LogSoftmaxRows(a) => {
                    let y = &self.nodes[i].value;
                    let mut ga = Array2::zeros(y.dim());
                    for r in 0..y.nrows() {
                        let row_sum: f64 = (0..y.ncols()).map(|c| g[(r, c)]).sum();
                        for c in 0..y.ncols() {
                            ga[(r, c)] = g[(r, c)] - y[(r, c)].exp() * row_sum;
                        }
                    }
                    grads[*a] += &ga;
                }
                Op::SumAll(a) => {
                    let ga = Array2::from_elem(self.nodes[*a].value.dim(), g[(0, 0)]);
                    grads[*a] += &ga;
                }
                Op::MeanAll(a) => {
                    let n = self.nodes[*a].value.len() as f64;
                    let ga = Array2::from_elem(self.nodes[*a].value.dim(), g[(0, 0)] / n);
                    grads[*a] += &ga;
                }
                Op::MeanRows(a) => {
                    let n = self.nodes[*a].value.nrows() as f64;
                    let (rows, cols) = self.nodes[*a].value.dim();
                    let mut ga = Array2::zeros((rows, cols));
                    for r in 0..rows {
                        for c in 0..cols {
                            ga[(r, c)] = g[(0, c)] / n;
                        }
                    }
                    grads[*a] += &ga;
                }
                Op::SegmentMeanRows(a, segments) => {
                    let a = *a;
                    let mut ga = Array2::zeros(self.nodes[a].value.dim());
                    for (si, &(s, e)) in segments.iter().enumerate() {
                        let len = (e - s) as f64;
                        for r in s..e {
                            for c in 0..ga.ncols() {
                                ga[(r, c)] += g[(si, c)] / len;
                            }
                        }
                    }
                    grads[a] += &ga;
                }
                Op::ConcatCols(a, b) => {
                    let (a, b) = (*a, *b);
                    let wa = self.nodes[a].value.ncols();
                    let ga = g.slice(ndarray::s![.., ..wa]).to_owned();
                    let gb = g.slice(ndarray::s![.., wa..]).to_owned();
                    grads[a] += &ga;
                    grads[b] += &gb;
                }
                Op::ConcatRows(a, b) => {
                    let (a, b) = (*a, *b);
                    let ha = self.nodes[a].value.nrows();
                    let ga = g.slice(ndarray::s![..ha, ..]).to_owned();
                    let gb = g.slice(ndarray::s![ha.., ..]).to_owned();
                    grads[a] += &ga;
                    grads[b] += &gb;
                }
                Op::Rows(a, indices) => {
                    let a = *a;
                    let mut ga = Array2::zeros(self.nodes[a].value.dim());
                    for (gi, &r) in indices.iter().enumerate() {
                        for c in 0..ga.ncols() {
                            ga[(r, c)] += g[(gi, c)];
                        }
                    }
                    grads[a] += &ga;
                }
                Op::Transpose(a) => {
                    let ga = g.t().to_owned();
                    grads[*a] += &ga;
                }
                Op::PickEntries(a, entries) => {
                    let a = *a;
                    let mut ga = Array2::zeros(self.nodes[a].value.dim());
                    for (gi, &(r, c)) in entries.iter().enumerate() {
                        ga[(r, c)] += g[(gi, 0)];
                    }
                    grads[a] += &ga;
                }
                Op::BceWithLogits(a, targets) => {
                    let a = *a;
                    let n = targets.len() as f64;
                    let scale = g[(0, 0)] / n;
                    let z = &self.nodes[a].value;
                    let mut ga = z.clone();
                    ga.zip_mut_with(targets, |x, &t| {
                        let s = 1.0 / (1.0 + (-*x).exp());
                        *x = (s - t) * scale;
                    });
                    grads[a] += &ga;
                }
            }
        }

        let mut out = HashMap::new();
        for (node, grad) in self.nodes.iter().zip(grads.into_iter()) {
            if let Some(name) = &node.param {
                match out.entry(name.clone()) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(grad);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += &grad;
                    }
                }
            }
        }
        out
    }
}
