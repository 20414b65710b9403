use std::collections::HashMap;

use crate::nlp::{lemmatize_text, Lexicon};
use crate::Scalar;

struct State {
    len: usize,
    link: Option<usize>,
    next: HashMap<char, usize>,
}

/// Suffix automaton over one string; answers longest-common-substring
/// queries against another in linear time.
struct SuffixAutomaton {
    states: Vec<State>,
    last: usize,
}

impl SuffixAutomaton {
    fn new(text: &[char]) -> Self {
        let mut sam = SuffixAutomaton {
            states: vec![State {
                len: 0,
                link: None,
                next: HashMap::new(),
            }],
            last: 0,
        };
        for &c in text {
            sam.extend(c);
        }
        sam
    }

    fn extend(&mut self, c: char) {
        let cur = self.states.len();
        self.states.push(State {
            len: self.states[self.last].len + 1,
            link: None,
            next: HashMap::new(),
        });
        let mut p = Some(self.last);
        while let Some(i) = p {
            if self.states[i].next.contains_key(&c) {
                break;
            }
            self.states[i].next.insert(c, cur);
            p = self.states[i].link;
        }
        match p {
            None => self.states[cur].link = Some(0),
            Some(p) => {
                let q = self.states[p].next[&c];
                if self.states[p].len + 1 == self.states[q].len {
                    self.states[cur].link = Some(q);
                } else {
                    let clone = self.states.len();
                    self.states.push(State {
                        len: self.states[p].len + 1,
                        link: self.states[q].link,
                        next: self.states[q].next.clone(),
                    });
                    let mut p = Some(p);
                    while let Some(i) = p {
                        if self.states[i].next.get(&c) != Some(&q) {
                            break;
                        }
                        self.states[i].next.insert(c, clone);
                        p = self.states[i].link;
                    }
                    self.states[q].link = Some(clone);
                    self.states[cur].link = Some(clone);
                }
            }
        }
        self.last = cur;
    }

    fn longest_common(&self, other: &[char]) -> usize {
        let (mut state, mut len, mut best) = (0, 0, 0);
        for c in other {
            while state != 0 && !self.states[state].next.contains_key(c) {
                state = self.states[state].link.unwrap_or(0);
                len = self.states[state].len;
            }
            if let Some(&n) = self.states[state].next.get(c) {
                state = n;
                len += 1;
            }
            best = best.max(len);
        }
        best
    }
}

/// Length in characters of the longest common contiguous substring.
pub fn longest_common_substring(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    SuffixAutomaton::new(&short).longest_common(&long)
}

/// Longest common substring length over the shorter string's length.
/// Operands are compared as given; `0` when either is empty.
pub fn lcs_ratio<S: Scalar>(a: &str, b: &str) -> S {
    let shorter = a.chars().count().min(b.chars().count());
    if shorter == 0 {
        return S::zero();
    }
    S::ratio(longest_common_substring(a, b), shorter)
}

/// Lowercased, word-by-word lemmatized form used on both sides of a match.
pub fn normalize(text: &str, lexicon: &Lexicon) -> String {
    lemmatize_text(&text.to_lowercase(), lexicon)
}

/// Similarity of two texts after case folding and lemmatization.
pub fn similarity<S: Scalar>(a: &str, b: &str, lexicon: &Lexicon) -> S {
    lcs_ratio(&normalize(a, lexicon), &normalize(b, lexicon))
}
