//! Pareto dominance, fast non-dominated sorting and crowding distances.
//!
//! All objectives are maximized.

/// True iff `a` is at least as good as `b` everywhere and strictly better
/// somewhere.
///
/// Panics if the vectors differ in length.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors must have equal length");
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Partitions indices into fronts: front 0 is the non-dominated set, front
/// i+1 is non-dominated once fronts `<= i` are removed.
pub fn fast_nondominated_sort<T: AsRef<[f64]>>(objs: &[T]) -> Vec<Vec<usize>> {
    let n = objs.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dom_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(objs[i].as_ref(), objs[j].as_ref()) {
                dominated_by[i].push(j);
                dom_count[j] += 1;
            } else if dominates(objs[j].as_ref(), objs[i].as_ref()) {
                dominated_by[j].push(i);
                dom_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dom_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                dom_count[j] -= 1;
                if dom_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// NSGA-II crowding distances for one front.
///
/// Per objective the front is sorted (ties broken by index); the first and
/// last of the ordering get infinite distance and interior members accumulate
/// the normalized gap to their neighbours. A zero-range objective contributes
/// nothing beyond the boundary convention.
pub fn crowding_distances<T: AsRef<[f64]>>(front: &[T]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0f64; n];
    if n == 0 {
        return dist;
    }
    let n_obj = front[0].as_ref().len();
    for obj in 0..n_obj {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| {
            front[a].as_ref()[obj]
                .total_cmp(&front[b].as_ref()[obj])
                .then(a.cmp(&b))
        });
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let lo = front[order[0]].as_ref()[obj];
        let hi = front[order[n - 1]].as_ref()[obj];
        let range = hi - lo;
        if range > 0.0 {
            for w in 1..n - 1 {
                let gap = front[order[w + 1]].as_ref()[obj] - front[order[w - 1]].as_ref()[obj];
                dist[order[w]] += gap / range;
            }
        }
    }
    dist
}

/// Elitist (μ+λ) environmental selection: fill by whole fronts, split the
/// last one by descending crowding distance (ties by lower index). Returns
/// at most `mu` indices.
pub fn nsga2_truncation<T: AsRef<[f64]>>(objs: &[T], mu: usize) -> Vec<usize> {
    let fronts = fast_nondominated_sort(objs);
    let mut selected = Vec::with_capacity(mu.min(objs.len()));
    for front in fronts {
        if selected.len() == mu {
            break;
        }
        if selected.len() + front.len() <= mu {
            selected.extend(front);
        } else {
            let front_objs: Vec<&[f64]> = front.iter().map(|&i| objs[i].as_ref()).collect();
            let dists = crowding_distances(&front_objs);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_unstable_by(|&a, &b| {
                dists[b].total_cmp(&dists[a]).then(front[a].cmp(&front[b]))
            });
            let need = mu - selected.len();
            selected.extend(order.into_iter().take(need).map(|w| front[w]));
            break;
        }
    }
    selected
}
