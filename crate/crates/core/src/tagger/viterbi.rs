use serde::{Deserialize, Serialize};

/// Transition scores of a linear chain over `n` tags, including the
/// sequence-start and sequence-end transitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Row-major `prev * n + next`.
    pub transitions: Vec<f64>,
}

impl Scores {
    pub fn zeros(n: usize) -> Self {
        Scores {
            start: vec![0.0; n],
            end: vec![0.0; n],
            transitions: vec![0.0; n * n],
        }
    }

    pub fn n_tags(&self) -> usize {
        self.start.len()
    }

    pub fn transition(&self, prev: usize, next: usize) -> f64 {
        self.transitions[prev * self.n_tags() + next]
    }
}

/// Total score of `path` given per-position emission scores.
pub fn path_score(emissions: &[Vec<f64>], scores: &Scores, path: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &t) in path.iter().enumerate() {
        total += emissions[i][t];
        total += match i {
            0 => scores.start[t],
            _ => scores.transition(path[i - 1], t),
        };
    }
    if let Some(&last) = path.last() {
        total += scores.end[last];
    }
    total
}

/// Highest-scoring tag path. Among equal scores the lower tag index wins at
/// every step. Returns an empty path for empty input.
pub fn decode(emissions: &[Vec<f64>], scores: &Scores) -> Vec<usize> {
    let n = scores.n_tags();
    if emissions.is_empty() || n == 0 {
        return Vec::new();
    }
    let len = emissions.len();
    let mut delta: Vec<f64> = (0..n).map(|t| scores.start[t] + emissions[0][t]).collect();
    let mut back = vec![vec![0usize; n]; len];
    let mut next = vec![0.0; n];
    for i in 1..len {
        for (t, slot) in next.iter_mut().enumerate() {
            let mut best = (0, f64::NEG_INFINITY);
            for (p, d) in delta.iter().enumerate() {
                let s = d + scores.transition(p, t);
                if s > best.1 {
                    best = (p, s);
                }
            }
            back[i][t] = best.0;
            *slot = best.1 + emissions[i][t];
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut last = (0, f64::NEG_INFINITY);
    for (t, d) in delta.iter().enumerate() {
        let s = d + scores.end[t];
        if s > last.1 {
            last = (t, s);
        }
    }
    let mut path = vec![last.0; len];
    for i in (1..len).rev() {
        path[i - 1] = back[i][path[i]];
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_paths(len: usize, n: usize) -> Vec<Vec<usize>> {
        (0..n.pow(len as u32))
            .map(|mut code| {
                (0..len)
                    .map(|_| {
                        let t = code % n;
                        code /= n;
                        t
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn emission_only() {
        let em = vec![vec![1.0, 0.0]; 4];
        let s = Scores::zeros(2);
        assert_eq!(decode(&em, &s), vec![0; 4]);
        let best = all_paths(4, 2)
            .into_iter()
            .map(|p| path_score(&em, &s, &p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, 4.0);
    }

    #[test]
    fn single_token_is_argmax() {
        let em = vec![vec![0.2, 1.5, 0.3]];
        assert_eq!(decode(&em, &Scores::zeros(3)), vec![1]);
    }

    #[test]
    fn transitions_force_alternation() {
        // emissions mildly favor tag 0, transitions strongly reward switching
        let em = vec![vec![1.0, 0.5]; 6];
        let mut s = Scores::zeros(2);
        s.transitions = vec![-5.0, 2.0, 2.0, -5.0];
        let path = decode(&em, &s);
        assert!(path.windows(2).all(|w| w[0] != w[1]));
        let best = all_paths(6, 2)
            .into_iter()
            .max_by(|a, b| path_score(&em, &s, a).total_cmp(&path_score(&em, &s, b)))
            .unwrap();
        assert_eq!(path_score(&em, &s, &path), path_score(&em, &s, &best));
        assert!(path_score(&em, &s, &path) > path_score(&em, &s, &[0; 6]));
    }
}
