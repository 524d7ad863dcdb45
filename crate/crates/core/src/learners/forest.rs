//! Bagged CART classification trees with Gini splits.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::derived_rng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxFeatures {
    All,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node<T> {
    /// Sparse class distribution `(class, probability)`.
    Leaf(Vec<(usize, T)>),
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<T> {
    nodes: Vec<Node<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest<T> {
    trees: Vec<DecisionTree<T>>,
    n_classes: usize,
}

struct TreeBuilder<'a, T, R> {
    x: ArrayView2<'a, T>,
    labels: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    n_try: usize,
    rng: &'a mut R,
    nodes: Vec<Node<T>>,
}

struct SplitChoice<T> {
    feature: usize,
    threshold: T,
    score: f64,
}

impl<'a, T: Real, R: Rng> TreeBuilder<'a, T, R> {
    fn leaf(&self, idx: &[usize]) -> Node<T> {
        let mut counts = vec![0usize; self.n_classes];
        for &i in idx {
            counts[self.labels[i]] += 1;
        }
        let n = T::from_count(idx.len());
        Node::Leaf(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (k, T::from_count(c) / n))
                .collect(),
        )
    }

    fn best_split_on(&self, idx: &mut [usize], feature: usize) -> Option<SplitChoice<T>> {
        let x = &self.x;
        idx.sort_by(|&a, &b| {
            x[[a, feature]]
                .partial_cmp(&x[[b, feature]])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let n = idx.len();
        let mut left = vec![0i64; self.n_classes];
        let mut right = vec![0i64; self.n_classes];
        for &i in idx.iter() {
            right[self.labels[i]] += 1;
        }
        let mut sq_left: i64 = 0;
        let mut sq_right: i64 = right.iter().map(|c| c * c).sum();
        let mut best: Option<SplitChoice<T>> = None;
        for pos in 0..n - 1 {
            let c = self.labels[idx[pos]];
            sq_left += 2 * left[c] + 1;
            left[c] += 1;
            sq_right -= 2 * right[c] - 1;
            right[c] -= 1;
            let (v, v_next) = (x[[idx[pos], feature]], x[[idx[pos + 1], feature]]);
            if !(v < v_next) {
                continue;
            }
            let nl = (pos + 1) as f64;
            let nr = (n - pos - 1) as f64;
            // Weighted Gini impurity times n.
            let score = (nl - sq_left as f64 / nl) + (nr - sq_right as f64 / nr);
            if best.as_ref().is_none_or(|b| score < b.score) {
                let mut threshold = (v + v_next) / T::lit(2.0);
                if !(threshold < v_next) {
                    threshold = v;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let first = self.labels[idx[0]];
        let pure = idx.iter().all(|&i| self.labels[i] == first);
        let depth_reached = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || idx.len() < self.params.min_samples_split.max(2) || depth_reached {
            let leaf = self.leaf(idx);
            self.nodes.push(leaf);
            return self.nodes.len() - 1;
        }
        let mut features: Vec<usize> = (0..self.x.ncols()).collect();
        features.shuffle(&mut *self.rng);
        let mut best: Option<SplitChoice<T>> = None;
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.n_try && best.is_some() {
                break;
            }
            if let Some(c) = self.best_split_on(idx, f) {
                if best.as_ref().is_none_or(|b| c.score < b.score) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else {
            let leaf = self.leaf(idx);
            self.nodes.push(leaf);
            return self.nodes.len() - 1;
        };
        let x = self.x;
        let f = split.feature;
        idx.sort_by(|&a, &b| {
            x[[a, f]]
                .partial_cmp(&x[[b, f]])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let cut = idx.partition_point(|&i| x[[i, f]] <= split.threshold);
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf(Vec::new()));
        let (l, r) = idx.split_at_mut(cut);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[me] = Node::Split {
            feature: f,
            threshold: split.threshold,
            left,
            right,
        };
        me
    }
}

impl<T: Real> DecisionTree<T> {
    fn leaf_for(&self, z: &[T]) -> &[(usize, T)] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(p) => return p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if z[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

impl<T: Real> RandomForest<T> {
    /// Each tree is grown on its own bootstrap sample drawn from a stream derived from `seed`.
    pub fn fit(
        x: ArrayView2<'_, T>,
        labels: &[usize],
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Self {
        let n = x.nrows();
        let d = x.ncols();
        let n_try = match params.max_features {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => ((d as f64).sqrt().floor() as usize).max(1),
        };
        let trees = (0..params.n_trees.max(1))
            .map(|t| {
                let mut rng = derived_rng(seed, &[t as u64]);
                let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let mut b = TreeBuilder {
                    x,
                    labels,
                    n_classes,
                    params,
                    n_try,
                    rng: &mut rng,
                    nodes: Vec::new(),
                };
                b.build(&mut idx, 0);
                DecisionTree { nodes: b.nodes }
            })
            .collect();
        Self { trees, n_classes }
    }

    pub fn pmf(&self, z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_classes];
        for t in &self.trees {
            for &(k, p) in t.leaf_for(z) {
                out[k] += p;
            }
        }
        let total: T = out.iter().copied().sum();
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[DecisionTree<T>] {
        &self.trees
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use ndarray::Array2;

    fn clusters(n: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = rng_from_seed(seed);
        let mut x = Array2::zeros((n, 2));
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let c = i % 2;
            let centre = if c == 0 { -2.0 } else { 2.0 };
            x[[i, 0]] = centre + 0.5 * f64::standard_normal(&mut rng);
            x[[i, 1]] = centre + 0.5 * f64::standard_normal(&mut rng);
            labels.push(c);
        }
        (x, labels)
    }

    #[test]
    fn separable_clusters_are_learned() {
        let (x, labels) = clusters(200, 1);
        let rf = RandomForest::fit(x.view(), &labels, 2, &ForestParams::default(), 7);
        let (xt, lt) = clusters(400, 2);
        let correct = (0..400)
            .filter(|&i| {
                let p = rf.pmf(&[xt[[i, 0]], xt[[i, 1]]]);
                let pred = if p[1] > p[0] { 1 } else { 0 };
                pred == lt[i]
            })
            .count();
        assert!(
            correct as f64 / 400.0 >= 0.95,
            "accuracy {}",
            correct as f64 / 400.0
        );
    }

    #[test]
    fn single_class_gives_one_hot() {
        let x = Array2::from_shape_vec((5, 1), vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let rf = RandomForest::fit(x.view(), &[2; 5], 4, &ForestParams::default(), 0);
        assert_eq!(rf.pmf(&[10.0]), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn pmf_is_normalised() {
        let (x, labels) = clusters(100, 3);
        let rf = RandomForest::fit(x.view(), &labels, 3, &ForestParams::default(), 1);
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            let z = [
                3.0 * f64::standard_normal(&mut rng),
                3.0 * f64::standard_normal(&mut rng),
            ];
            let p = rf.pmf(&z);
            assert!(p.iter().all(|&v| v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, labels) = clusters(80, 4);
        let a = RandomForest::fit(x.view(), &labels, 2, &ForestParams::default(), 5);
        let b = RandomForest::fit(x.view(), &labels, 2, &ForestParams::default(), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_features_gives_class_frequencies() {
        let x = Array2::<f64>::zeros((4, 0));
        let params = ForestParams {
            n_trees: 1,
            ..ForestParams::default()
        };
        let rf = RandomForest::fit(x.view(), &[0, 0, 1, 1], 2, &params, 3);
        let p = rf.pmf(&[]);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        assert_eq!(rf.trees()[0].n_nodes(), 1);
    }
}
