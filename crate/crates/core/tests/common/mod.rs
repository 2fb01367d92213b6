use stickkit::reduce_sat::{normalize_instance, OneInThreeInstance};

/// Instances for the reduction checks: normalized inputs with up to three
/// clauses, plus the normal forms of `(x, x, y)` and `(x, x, x)`.
pub fn sat_fixtures() -> Vec<OneInThreeInstance> {
    let raw: Vec<(usize, Vec<[usize; 3]>)> = vec![
        (3, vec![[1, 2, 3]]),
        (4, vec![[1, 2, 3], [2, 3, 4]]),
        (5, vec![[1, 2, 3], [3, 4, 5]]),
        (5, vec![[1, 2, 3], [1, 4, 5], [2, 4, 5]]),
        (4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4]]),
        (6, vec![[1, 4, 6], [2, 3, 5], [1, 2, 6]]),
        (6, vec![[4, 5, 6], [1, 2, 3], [3, 4, 6]]),
        (4, vec![[2, 3, 4], [1, 2, 3]]),
        (5, vec![[1, 2, 5], [1, 3, 4]]),
    ];
    let mut out: Vec<OneInThreeInstance> = raw.into_iter().map(|(n, c)| OneInThreeInstance::new(n, c)).collect();
    out.push(normalize_instance(&OneInThreeInstance::new(2, vec![[1, 1, 2]])));
    out.push(normalize_instance(&OneInThreeInstance::new(1, vec![[1, 1, 1]])));
    out
}
