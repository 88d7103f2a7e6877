/// One longest common subsequence of `x` and `y`.
///
/// Fills the usual prefix-length table and walks it back from the end. When
/// the last elements differ and both shorter prefixes give the same length,
/// the walk drops the last element of `y` first, so the result is
/// deterministic.
pub fn lcs<T: PartialEq + Clone>(x: &[T], y: &[T]) -> Vec<T> {
    let (m, n) = (x.len(), y.len());
    if m == 0 || n == 0 {
        return Vec::new();
    }
    let width = n + 1;
    let mut table = vec![0u32; (m + 1) * width];
    for i in 1..=m {
        for j in 1..=n {
            table[i * width + j] = if x[i - 1] == y[j - 1] {
                table[(i - 1) * width + j - 1] + 1
            } else {
                table[i * width + j - 1].max(table[(i - 1) * width + j])
            };
        }
    }

    let mut out = Vec::with_capacity(table[m * width + n] as usize);
    let (mut i, mut j) = (m, n);
    while i > 0 && j > 0 {
        if x[i - 1] == y[j - 1] {
            out.push(x[i - 1].clone());
            i -= 1;
            j -= 1;
        } else if table[i * width + j - 1] >= table[(i - 1) * width + j] {
            j -= 1;
        } else {
            i -= 1;
        }
    }
    out.reverse();
    out
}

/// Length of the longest common subsequence, in `O(min(m, n))` memory.
pub fn lcs_len<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for a in long {
        for (j, b) in short.iter().enumerate() {
            cur[j + 1] = if a == b { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn is_subsequence(sub: &[char], of: &[char]) -> bool {
        let mut it = of.iter();
        sub.iter().all(|c| it.any(|x| x == c))
    }

    #[test]
    fn empty_operands() {
        assert!(lcs(&chars("ABC"), &[]).is_empty());
        assert!(lcs::<char>(&[], &chars("ABC")).is_empty());
        assert_eq!(lcs_len::<u8>(&[], &[]), 0);
    }

    #[test]
    fn identical_sequences() {
        let x = chars("ABCBDAB");
        assert_eq!(lcs(&x, &x), x);
    }

    #[test]
    fn textbook_pair() {
        let (x, y) = (chars("ABCBDAB"), chars("BDCABA"));
        let common = lcs(&x, &y);
        assert_eq!(common.len(), 4);
        assert_eq!(lcs_len(&x, &y), 4);
        assert!(is_subsequence(&common, &x) && is_subsequence(&common, &y));
    }

    #[test]
    fn tie_break_prefers_dropping_from_y() {
        // "A" and "B" are both longest. Dropping y's last element first
        // leaves x's last element free to match.
        assert_eq!(lcs(&chars("AB"), &chars("BA")), chars("B"));
        assert_eq!(lcs(&chars("BA"), &chars("AB")), chars("A"));
    }
}
