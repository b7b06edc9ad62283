//! Exhaustive generation of legal strings over the labels `2..=n+1`.

use crate::legal_string::{Label, LegalString, Pointer, MIN_LABEL};

/// Every arrangement of the multiset `{2,2,3,3,...}` as a label sequence.
fn label_patterns(n_labels: usize) -> Vec<Vec<Label>> {
    fn go(remaining: &mut [u8], cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(cur.clone());
            return;
        }
        for k in 0..remaining.len() {
            if remaining[k] == 0 {
                continue;
            }
            remaining[k] -= 1;
            cur.push(MIN_LABEL + k as Label);
            go(remaining, cur, out);
            cur.pop();
            remaining[k] += 1;
        }
    }
    let mut out = Vec::new();
    go(&mut vec![2; n_labels], &mut Vec::new(), &mut out);
    out
}

/// Every legal string with exactly `n_labels` labels, the labels being
/// `2..=n_labels+1`: all interleavings times all four polarity patterns per
/// label. There are `(2n)!/2^n * 4^n` of them.
pub fn enumerate_legal_strings(n_labels: usize) -> impl Iterator<Item = LegalString> {
    let polarity_patterns = 1usize << (2 * n_labels);
    label_patterns(n_labels)
        .into_iter()
        .flat_map(move |pattern| {
            (0..polarity_patterns).map(move |bits| {
                let mut seen = vec![false; n_labels];
                let items = pattern
                    .iter()
                    .map(|&l| {
                        let k = (l - MIN_LABEL) as usize;
                        let second = std::mem::replace(&mut seen[k], true);
                        let bit = 2 * k + usize::from(second);
                        Pointer::new(l, bits >> bit & 1 == 1).expect("labels start at 2")
                    })
                    .collect();
                LegalString::new(items).expect("each label placed twice")
            })
        })
}

/// All legal strings with at most `max_labels` labels, smallest first.
pub fn legal_strings_up_to(max_labels: usize) -> Vec<LegalString> {
    (0..=max_labels).flat_map(enumerate_legal_strings).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn counts() {
        let sizes: Vec<usize> = (0..=3)
            .map(|n| enumerate_legal_strings(n).count())
            .collect();
        assert_eq!(sizes, vec![1, 4, 96, 5760]);
        assert_eq!(legal_strings_up_to(3).len(), 5861);
    }

    #[test]
    fn single_label_strings() {
        let got: BTreeSet<String> = enumerate_legal_strings(1).map(|u| u.to_string()).collect();
        let want: BTreeSet<String> = ["2 2", "-2 -2", "2 -2", "-2 2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, want);
        assert_eq!(
            enumerate_legal_strings(0).collect::<Vec<_>>(),
            vec![LegalString::empty()]
        );
    }

    #[test]
    fn no_duplicates() {
        let all: Vec<_> = enumerate_legal_strings(3).collect();
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(all.len(), distinct.len());
    }
}
