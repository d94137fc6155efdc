//! The classic Porter suffix-stripping stemmer (original five-step rules).
//!
//! Within a step the first rule whose suffix matches decides the outcome: if
//! its condition fails, the word is left unchanged for that step.

/// Condition evaluated on the stem left after removing a suffix.
#[derive(Clone, Copy)]
enum Cond {
    Always,
    /// measure > n
    MeasureAbove(usize),
    /// measure > 1 and the stem ends in `s` or `t`
    MeasureAboveOneST,
}

struct Word {
    chars: Vec<char>,
}

impl Word {
    fn is_consonant(&self, i: usize) -> bool {
        match self.chars[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `chars[..len]`.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut prev_vowel = false;
        for i in 0..len {
            let consonant = self.is_consonant(i);
            if consonant && prev_vowel {
                m += 1;
            }
            prev_vowel = !consonant;
        }
        m
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_consonant(i))
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.chars.len()
            && self.chars[self.chars.len() - n..]
                .iter()
                .copied()
                .eq(suffix.chars())
    }

    fn ends_double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.chars[len - 1] == self.chars[len - 2] && self.is_consonant(len - 1)
    }

    /// consonant-vowel-consonant ending where the last consonant is not w, x or y.
    fn ends_cvc(&self, len: usize) -> bool {
        len >= 3
            && self.is_consonant(len - 3)
            && !self.is_consonant(len - 2)
            && self.is_consonant(len - 1)
            && !matches!(self.chars[len - 1], 'w' | 'x' | 'y')
    }

    fn holds(&self, cond: Cond, stem_len: usize) -> bool {
        match cond {
            Cond::Always => true,
            Cond::MeasureAbove(n) => self.measure(stem_len) > n,
            Cond::MeasureAboveOneST => {
                self.measure(stem_len) > 1
                    && stem_len > 0
                    && matches!(self.chars[stem_len - 1], 's' | 't')
            }
        }
    }

    fn replace_tail(&mut self, suffix_len: usize, replacement: &str) {
        self.chars.truncate(self.chars.len() - suffix_len);
        self.chars.extend(replacement.chars());
    }

    /// Applies the first rule whose suffix matches; returns whether one matched.
    fn apply_rules(&mut self, rules: &[(&str, &str, Cond)]) -> bool {
        for &(suffix, replacement, cond) in rules {
            if self.ends_with(suffix) {
                let suffix_len = suffix.chars().count();
                let stem_len = self.chars.len() - suffix_len;
                if self.holds(cond, stem_len) {
                    self.replace_tail(suffix_len, replacement);
                }
                return true;
            }
        }
        false
    }

    fn step1a(&mut self) {
        self.apply_rules(&[
            ("sses", "ss", Cond::Always),
            ("ies", "i", Cond::Always),
            ("ss", "ss", Cond::Always),
            ("s", "", Cond::Always),
        ]);
    }

    fn step1b(&mut self) {
        if self.ends_with("eed") {
            if self.measure(self.chars.len() - 3) > 0 {
                self.chars.pop();
            }
            return;
        }
        let removed = ["ed", "ing"].iter().find_map(|suffix| {
            let n = suffix.len();
            (self.ends_with(suffix) && self.has_vowel(self.chars.len() - n)).then_some(n)
        });
        let Some(n) = removed else { return };
        self.chars.truncate(self.chars.len() - n);

        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.chars.push('e');
            return;
        }
        let len = self.chars.len();
        if self.ends_double_consonant(len) {
            if !matches!(self.chars[len - 1], 'l' | 's' | 'z') {
                self.chars.pop();
            }
            return;
        }
        if self.measure(len) == 1 && self.ends_cvc(len) {
            self.chars.push('e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with("y") && self.has_vowel(self.chars.len() - 1) {
            let last = self.chars.len() - 1;
            self.chars[last] = 'i';
        }
    }

    fn step2(&mut self) {
        const M0: Cond = Cond::MeasureAbove(0);
        self.apply_rules(&[
            ("ational", "ate", M0),
            ("tional", "tion", M0),
            ("enci", "ence", M0),
            ("anci", "ance", M0),
            ("izer", "ize", M0),
            ("abli", "able", M0),
            ("alli", "al", M0),
            ("entli", "ent", M0),
            ("eli", "e", M0),
            ("ousli", "ous", M0),
            ("ization", "ize", M0),
            ("ation", "ate", M0),
            ("ator", "ate", M0),
            ("alism", "al", M0),
            ("iveness", "ive", M0),
            ("fulness", "ful", M0),
            ("ousness", "ous", M0),
            ("aliti", "al", M0),
            ("iviti", "ive", M0),
            ("biliti", "ble", M0),
        ]);
    }

    fn step3(&mut self) {
        const M0: Cond = Cond::MeasureAbove(0);
        self.apply_rules(&[
            ("icate", "ic", M0),
            ("ative", "", M0),
            ("alize", "al", M0),
            ("iciti", "ic", M0),
            ("ical", "ic", M0),
            ("ful", "", M0),
            ("ness", "", M0),
        ]);
    }

    fn step4(&mut self) {
        const M1: Cond = Cond::MeasureAbove(1);
        self.apply_rules(&[
            ("al", "", M1),
            ("ance", "", M1),
            ("ence", "", M1),
            ("er", "", M1),
            ("ic", "", M1),
            ("able", "", M1),
            ("ible", "", M1),
            ("ant", "", M1),
            ("ement", "", M1),
            ("ment", "", M1),
            ("ent", "", M1),
            ("ion", "", Cond::MeasureAboveOneST),
            ("ou", "", M1),
            ("ism", "", M1),
            ("ate", "", M1),
            ("iti", "", M1),
            ("ous", "", M1),
            ("ive", "", M1),
            ("ize", "", M1),
        ]);
    }

    fn step5a(&mut self) {
        if self.ends_with("e") {
            let stem_len = self.chars.len() - 1;
            let m = self.measure(stem_len);
            if m > 1 || (m == 1 && !self.ends_cvc(stem_len)) {
                self.chars.pop();
            }
        }
    }

    fn step5b(&mut self) {
        let len = self.chars.len();
        if self.ends_with("ll") && self.measure(len - 1) > 1 {
            self.chars.pop();
        }
    }
}

/// Porter stem of a lowercase token.
///
/// A token that would be stripped to nothing (only `"s"`) is returned as is.
pub fn stem(token: &str) -> String {
    let mut word = Word {
        chars: token.chars().collect(),
    };
    word.step1a();
    word.step1b();
    word.step1c();
    word.step2();
    word.step3();
    word.step4();
    word.step5a();
    word.step5b();
    if word.chars.is_empty() {
        return token.to_string();
    }
    word.chars.into_iter().collect()
}
