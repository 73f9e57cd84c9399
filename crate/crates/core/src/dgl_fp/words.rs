//! Words over a weighted alphabet and the Lyndon machinery behind the basis.

pub type Word = Vec<u8>;

/// A word is Lyndon iff it is strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Split point of the standard factorization `w = uv`, `v` the longest proper
/// Lyndon suffix. `None` for single letters.
pub fn standard_split(w: &[u8]) -> Option<usize> {
    (1..w.len()).find(|&i| is_lyndon(&w[i..]))
}

pub fn word_degree(w: &[u8], degrees: &[u32]) -> u32 {
    w.iter().map(|&a| degrees[a as usize]).sum()
}

/// Every non-empty word whose weighted degree is at most `max_degree`.
pub fn words_up_to(degrees: &[u32], max_degree: u32) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<(Word, u32)> = vec![(Vec::new(), 0)];
    while let Some((w, deg)) = stack.pop() {
        for (a, &da) in degrees.iter().enumerate() {
            if deg + da <= max_degree {
                let mut next = w.clone();
                next.push(a as u8);
                out.push(next.clone());
                stack.push((next, deg + da));
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_predicate() {
        assert!(is_lyndon(&[0]));
        assert!(is_lyndon(&[0, 1]));
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[1, 0]));
        assert!(!is_lyndon(&[0, 0]));
        assert!(!is_lyndon(&[0, 1, 0, 1]));
        assert!(is_lyndon(&[0, 0, 1, 0, 1]));
    }

    #[test]
    fn lyndon_counts_match_necklace_formula() {
        // binary Lyndon words of length n: 2, 1, 2, 3, 6, 9, 18, 30
        let words = words_up_to(&[1, 1], 8);
        let expect = [2usize, 1, 2, 3, 6, 9, 18, 30];
        for (n, &e) in expect.iter().enumerate() {
            let c = words.iter().filter(|w| w.len() == n + 1 && is_lyndon(w)).count();
            assert_eq!(c, e, "length {}", n + 1);
        }
    }

    #[test]
    fn standard_factorization_examples() {
        // 0 01 -> u = 0, v = 01 ; 0011 -> 0 | 011 ; 01011 -> 01 | 011
        assert_eq!(standard_split(&[0, 0, 1]), Some(1));
        assert_eq!(standard_split(&[0, 0, 1, 1]), Some(1));
        assert_eq!(standard_split(&[0, 1, 0, 1, 1]), Some(2));
        assert_eq!(standard_split(&[0]), None);
        for w in words_up_to(&[1, 1, 1], 6).into_iter().filter(|w| w.len() > 1 && is_lyndon(w)) {
            let i = standard_split(&w).unwrap();
            assert!(is_lyndon(&w[..i]) && is_lyndon(&w[i..]), "{w:?}");
        }
    }

    #[test]
    fn weighted_enumeration_respects_degree() {
        let words = words_up_to(&[3, 2], 7);
        assert!(words.iter().all(|w| word_degree(w, &[3, 2]) <= 7));
        // degrees 2,3,4,5,6,7 -> 1,1,1,2,2,3 words
        assert_eq!(words.len(), 10);
    }
}
