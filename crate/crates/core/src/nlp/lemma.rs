use super::Lexicon;

/// Reduces a single token to its base form.
///
/// Irregular forms come from the lexicon; everything else goes through a
/// small suffix stripper (`-ies`, `-es`, `-s`, `-ed`, `-ing`) that repairs
/// doubled consonants and restores a dropped `e` when that yields a known
/// verb. Rules are applied until nothing changes, so the result is always a
/// fixed point and the function is idempotent.
pub fn lemmatize(token: &str, lexicon: &Lexicon) -> String {
    let mut current = token.trim().to_lowercase();
    loop {
        let next = strip_once(&current, lexicon);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Lemmatizes each whitespace-separated word and rejoins with single spaces.
pub fn lemmatize_text(text: &str, lexicon: &Lexicon) -> String {
    text.split_whitespace()
        .map(|w| lemmatize(w, lexicon))
        .collect::<Vec<_>>()
        .join(" ")
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

fn strip_once(word: &str, lexicon: &Lexicon) -> String {
    if let Some(lemma) = lexicon.irregular_lemma(word) {
        return lemma.to_string();
    }
    if lexicon.is_verb_lemma(word) || !word.chars().all(|c| c.is_alphabetic()) {
        return word.to_string();
    }
    let len = word.chars().count();
    if len <= 3 {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if len > 4 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("ied") {
        if len > 4 {
            return format!("{stem}y");
        }
    }
    if word.ends_with("sses") {
        return word[..word.len() - 2].to_string();
    }
    for suffix in ["ches", "shes", "xes", "zes"] {
        if word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.chars().count() >= 3 && has_vowel(stem) {
                return repair(stem, lexicon);
            }
        }
    }
    if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

fn repair(stem: &str, lexicon: &Lexicon) -> String {
    if lexicon.is_verb_lemma(stem) {
        return stem.to_string();
    }
    let with_e = format!("{stem}e");
    if lexicon.is_verb_lemma(&with_e) {
        return with_e;
    }
    let mut chars = stem.chars().rev();
    if let (Some(a), Some(b)) = (chars.next(), chars.next()) {
        if a == b && !matches!(a, 'l' | 's' | 'z' | 'e' | 'o') && !has_vowel(&a.to_string()) {
            return stem[..stem.len() - a.len_utf8()].to_string();
        }
    }
    stem.to_string()
}
