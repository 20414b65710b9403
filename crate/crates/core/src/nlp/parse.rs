use super::{lemmatize, Lexicon, NlpError, ParseOutcome, ParsedPhrase, SentenceType};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    text: String,
    lower: String,
    quoted: bool,
    comma: bool,
}

impl Token {
    fn word(text: &str) -> Self {
        Token {
            text: text.to_string(),
            lower: text.to_lowercase(),
            quoted: false,
            comma: false,
        }
    }

    fn comma() -> Self {
        Token {
            text: ",".into(),
            lower: ",".into(),
            quoted: false,
            comma: true,
        }
    }

    fn quoted(text: &str) -> Self {
        Token {
            quoted: true,
            ..Token::word(text)
        }
    }

    fn display(&self) -> String {
        if self.quoted {
            format!("\"{}\"", self.text)
        } else {
            self.text.clone()
        }
    }
}

/// Splits a message into sentences on `.`, `!` or `?` followed by
/// whitespace or the end of the text. Sentences keep their punctuation.
pub fn segment(message: &str) -> Result<Vec<String>, NlpError> {
    let text = message.trim();
    if text.is_empty() {
        return Err(NlpError::EmptyInput);
    }
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        current.push(c);
        let at_boundary = chars.get(i + 1).is_none_or(|n| n.is_whitespace());
        if matches!(c, '.' | '!' | '?') && at_boundary {
            let s = current.trim();
            if !s.is_empty() && s.chars().any(char::is_alphanumeric) {
                sentences.push(s.to_string());
            }
            current.clear();
        }
    }
    let rest = current.trim();
    if !rest.is_empty() && rest.chars().any(char::is_alphanumeric) {
        sentences.push(rest.to_string());
    }
    if sentences.is_empty() {
        return Err(NlpError::EmptyInput);
    }
    Ok(sentences)
}

fn is_quote_open(c: char) -> bool {
    matches!(c, '"' | '\u{201c}' | '\u{2018}')
}

fn is_quote_close(c: char) -> bool {
    matches!(c, '"' | '\u{201d}' | '\u{2019}')
}

fn push_word(raw: &str, out: &mut Vec<Token>) {
    let trimmed = raw.trim_start_matches(['(', '[', '{']);
    let core = trimmed.trim_end_matches(['.', ',', ';', ':', '!', '?', ')', ']', '}']);
    let trailing = &trimmed[core.len()..];
    if !core.is_empty() {
        let lower = core.to_lowercase();
        let split = |cut: usize, tail: &str, out: &mut Vec<Token>| {
            if cut > 0 {
                out.push(Token::word(&core[..cut]));
            }
            out.push(Token::word(tail));
        };
        if lower == "can't" || lower == "cannot" {
            out.push(Token::word(&core[..3]));
            out.push(Token::word("not"));
        } else if lower == "won't" {
            out.push(Token::word("will"));
            out.push(Token::word("not"));
        } else if let Some(stem) = lower.strip_suffix("n't") {
            split(stem.len(), "not", out);
        } else if lower.ends_with("'s") {
            out.push(Token::word(&core[..core.len() - 2]));
        } else if lower.ends_with("'m") {
            split(core.len() - 2, "am", out);
        } else if lower.ends_with("'re") {
            split(core.len() - 3, "are", out);
        } else if lower.ends_with("'ve") {
            split(core.len() - 3, "have", out);
        } else if lower.ends_with("'ll") {
            split(core.len() - 3, "will", out);
        } else {
            out.push(Token::word(core));
        }
    }
    if trailing.contains([',', ';', ':']) {
        out.push(Token::comma());
    }
}

fn tokenize(sentence: &str, lex: &Lexicon) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut out = Vec::new();
    let mut word = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let word_start = word.is_empty();
        let single = c == '\'' && word_start;
        if word_start && (is_quote_open(c) || single) {
            let close = (i + 1..chars.len()).find(|&j| {
                let d = chars[j];
                let closes = if single { d == '\'' } else { is_quote_close(d) };
                closes && chars.get(j + 1).is_none_or(|n| !n.is_alphanumeric())
            });
            if let Some(j) = close {
                let inner: String = chars[i + 1..j].iter().collect();
                if !inner.trim().is_empty() {
                    out.push(Token::quoted(inner.trim()));
                }
                i = j + 1;
                // Punctuation glued to the closing quote.
                while i < chars.len() && !chars[i].is_whitespace() {
                    if matches!(chars[i], ',' | ';' | ':') {
                        out.push(Token::comma());
                    }
                    i += 1;
                }
                continue;
            }
        }
        if c.is_whitespace() {
            if !word.is_empty() {
                push_word(&word, &mut out);
                word.clear();
            }
        } else {
            word.push(c);
        }
        i += 1;
    }
    if !word.is_empty() {
        push_word(&word, &mut out);
    }
    merge_multiword_verbs(out, lex)
}

fn merge_multiword_verbs(tokens: Vec<Token>, lex: &Lexicon) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    'outer: while i < tokens.len() {
        for phrase in lex.multiword_verbs() {
            let n = phrase.len();
            if i + n <= tokens.len()
                && tokens[i..i + n]
                    .iter()
                    .zip(phrase)
                    .all(|(t, w)| !t.quoted && lemmatize(&t.lower, lex) == *w || t.lower == *w)
            {
                let text = tokens[i..i + n]
                    .iter()
                    .map(|t| t.text.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push(Token {
                    lower: text.to_lowercase(),
                    text,
                    quoted: false,
                    comma: false,
                });
                i += n;
                continue 'outer;
            }
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

fn verb_lemma(t: &Token, lex: &Lexicon) -> Option<String> {
    if t.quoted || t.comma {
        return None;
    }
    if lex.is_verb_lemma(&t.lower) {
        return Some(t.lower.clone());
    }
    let lemma = lemmatize(&t.lower, lex);
    lex.is_verb_lemma(&lemma).then_some(lemma)
}

fn is_past(t: &Token, lex: &Lexicon) -> bool {
    lex.is_irregular_past(&t.lower) || (t.lower.ends_with("ed") && t.lower.len() > 3)
}

fn is_participle(t: &Token, lex: &Lexicon) -> bool {
    !t.quoted && (lex.is_irregular_participle(&t.lower) || (t.lower.ends_with("ed") && t.lower.len() > 3))
}

fn skip_fillers(tokens: &[Token], lex: &Lexicon) -> usize {
    tokens
        .iter()
        .position(|t| !(t.comma || (!t.quoted && lex.is_filler(&t.lower))))
        .unwrap_or(tokens.len())
}

/// Subject-predicate analysis of a declarative clause.
#[derive(Debug)]
struct Clause {
    subject: Vec<Token>,
    verb: Token,
    lemma: String,
    modal: bool,
    passive: bool,
    past: bool,
    first_person: bool,
    tail: Vec<Token>,
}

fn analyze_declarative(tokens: &[Token], lex: &Lexicon) -> Option<Clause> {
    let start = skip_fillers(tokens, lex);
    let predicate = (start + 1..tokens.len()).find(|&k| {
        let t = &tokens[k];
        if t.quoted || t.comma {
            return false;
        }
        if lex.is_auxiliary(&t.lower) || lex.is_modal(&t.lower) {
            return true;
        }
        verb_lemma(t, lex).is_some() && !lex.is_determiner(&tokens[k - 1].lower)
    })?;
    let subject: Vec<Token> = tokens[start..predicate].to_vec();
    if subject.iter().any(|t| t.comma) {
        return None;
    }

    let mut j = predicate;
    let mut modal = false;
    let mut auxiliaries: Vec<usize> = Vec::new();
    while j < tokens.len() {
        let t = &tokens[j];
        if t.quoted || t.comma {
            break;
        }
        if lex.is_modal(&t.lower) {
            modal = true;
            if t.lower == "ought" && tokens.get(j + 1).is_some_and(|n| n.lower == "to") {
                j += 1;
            }
        } else if lex.is_auxiliary(&t.lower) {
            auxiliaries.push(j);
        } else if !lex.is_negation(&t.lower) {
            break;
        }
        j += 1;
    }

    let has_be = auxiliaries.iter().any(|&a| lemmatize(&tokens[a].lower, lex) == "be");
    let (verb_index, lemma) = match tokens.get(j) {
        Some(t) if verb_lemma(t, lex).is_some() => (j, verb_lemma(t, lex)?),
        Some(t)
            if !auxiliaries.is_empty()
                && !t.quoted
                && !t.comma
                && (is_participle(t, lex) || t.lower.ends_with("ing")) =>
        {
            (j, lemmatize(&t.lower, lex))
        }
        _ => {
            let &last = auxiliaries.last()?;
            (last, lemmatize(&tokens[last].lower, lex))
        }
    };
    let verb = tokens[verb_index].clone();
    let main_is_aux = auxiliaries.last() == Some(&verb_index);
    let passive = modal && has_be && !main_is_aux && is_participle(&verb, lex);
    let past = is_past(&verb, lex)
        || auxiliaries
            .first()
            .is_some_and(|&a| lex.is_irregular_past(&tokens[a].lower));
    let content: Vec<&Token> = subject.iter().filter(|t| !lex.is_determiner(&t.lower)).collect();
    let first_person = content.len() == 1 && lex.is_first_person(&content[0].lower);
    let tail_start = if main_is_aux { j } else { verb_index + 1 };
    Some(Clause {
        subject,
        verb,
        lemma,
        modal,
        passive,
        past,
        first_person,
        tail: tokens[tail_start.min(tokens.len())..].to_vec(),
    })
}

/// Index of the imperative verb, if the clause opens with one.
fn imperative_verb(tokens: &[Token], lex: &Lexicon) -> Option<usize> {
    let i = skip_fillers(tokens, lex);
    let t = tokens.get(i)?;
    if lex.is_auxiliary(&t.lower) || lex.is_modal(&t.lower) || verb_lemma(t, lex).is_none() {
        return None;
    }
    // "Save button doesn't work": a bare noun run straight into an
    // auxiliary means the leading word was a noun.
    if let Some(k) =
        (i + 1..tokens.len()).find(|&k| lex.is_auxiliary(&tokens[k].lower) || lex.is_modal(&tokens[k].lower))
    {
        let bare_run = tokens[i + 1..k].iter().all(|t| {
            !t.quoted
                && !t.comma
                && !lex.is_stopword(&t.lower)
                && !lex.is_preposition(&t.lower)
                && !lex.is_filler(&t.lower)
        });
        if k > i + 1 && bare_run {
            return None;
        }
    }
    Some(i)
}

#[derive(Debug)]
enum Conditional {
    /// `main marker sub`, or `marker sub, main`.
    Split { main: Vec<Token>, sub: Vec<Token> },
}

fn find_conditional(tokens: &[Token], lex: &Lexicon) -> Option<Conditional> {
    let start = skip_fillers(tokens, lex);
    let is_marker = |t: &Token| !t.quoted && lex.is_condition_marker(&t.lower);
    if tokens.get(start).is_some_and(is_marker) {
        let comma = (start + 2..tokens.len()).find(|&k| tokens[k].comma)?;
        return Some(Conditional::Split {
            main: tokens[comma + 1..].to_vec(),
            sub: tokens[start + 1..comma].to_vec(),
        });
    }
    let k = (start + 1..tokens.len()).find(|&k| is_marker(&tokens[k]))?;
    let mut main = tokens[..k].to_vec();
    while main.last().is_some_and(|t| t.comma) {
        main.pop();
    }
    Some(Conditional::Split {
        main,
        sub: tokens[k + 1..].to_vec(),
    })
}

fn sub_clause_has_verb(sub: &[Token], lex: &Lexicon) -> bool {
    imperative_verb(sub, lex).is_some() || analyze_declarative(sub, lex).is_some()
}

fn conditional_parts(tokens: &[Token], lex: &Lexicon) -> Option<(Vec<Token>, Vec<Token>)> {
    let Conditional::Split { main, sub } = find_conditional(tokens, lex)?;
    if imperative_verb(&main, lex).is_some() {
        return None;
    }
    if analyze_declarative(&main, lex).is_none() || !sub_clause_has_verb(&sub, lex) {
        return None;
    }
    Some((main, sub))
}

/// Assigns a discourse type to one sentence. Never fails: sentences that fit
/// no pattern are [`SentenceType::Unparseable`].
pub fn classify(sentence: &str, lexicon: &Lexicon) -> SentenceType {
    classify_tokens(&tokenize(sentence, lexicon), lexicon)
}

fn classify_tokens(tokens: &[Token], lex: &Lexicon) -> SentenceType {
    if tokens.iter().all(|t| t.comma) {
        return SentenceType::Unparseable;
    }
    if conditional_parts(tokens, lex).is_some() {
        return SentenceType::ConditionalWhen;
    }
    if imperative_verb(tokens, lex).is_some() || leading_condition_then_imperative(tokens, lex).is_some() {
        return SentenceType::Imperative;
    }
    let Some(clause) = analyze_declarative(tokens, lex) else {
        return SentenceType::Unparseable;
    };
    if clause.passive {
        SentenceType::PassiveExpectation
    } else if clause.modal {
        SentenceType::ModalExpectation
    } else if clause.first_person && clause.past {
        SentenceType::DeclarativePast
    } else if !clause.first_person && lex.mentions_crash(&joined(tokens)) {
        SentenceType::CrashPhrase
    } else {
        SentenceType::DeclarativePresent
    }
}

/// "When the list loads, tap the first item" ⇒ the imperative main clause.
fn leading_condition_then_imperative(tokens: &[Token], lex: &Lexicon) -> Option<Vec<Token>> {
    let Conditional::Split { main, .. } = find_conditional(tokens, lex)?;
    let start = skip_fillers(tokens, lex);
    if !tokens.get(start).is_some_and(|t| lex.is_condition_marker(&t.lower)) {
        return None;
    }
    imperative_verb(&main, lex).map(|_| main)
}

fn joined(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
}

/// Noun phrase from a token run: determiners and negations dropped,
/// stopwords and prepositions trimmed from both edges.
fn noun_phrase(tokens: &[Token], lex: &Lexicon) -> String {
    let kept: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.quoted || !(t.comma || lex.is_determiner(&t.lower) || lex.is_negation(&t.lower)))
        .collect();
    let edge = |t: &&Token| {
        !t.quoted && (lex.is_stopword(&t.lower) || lex.is_preposition(&t.lower) || lex.is_filler(&t.lower))
    };
    let first = kept.iter().position(|t| !edge(t));
    let last = kept.iter().rposition(|t| !edge(t));
    match (first, last) {
        (Some(a), Some(b)) => kept[a..=b].iter().map(|t| t.display()).collect::<Vec<_>>().join(" "),
        _ => String::new(),
    }
}

/// Splits the words after the verb into object, preposition and object2.
fn split_tail(tail: &[Token], lex: &Lexicon) -> (String, String, String) {
    // Clause ends at a comma, a condition marker, an auxiliary or a
    // conjunction that starts a new verb phrase.
    let end = (0..tail.len())
        .find(|&k| {
            let t = &tail[k];
            if t.quoted {
                return false;
            }
            t.comma
                || lex.is_condition_marker(&t.lower)
                || lex.is_modal(&t.lower)
                || (k > 0 && lex.is_auxiliary(&t.lower))
                || ((t.lower == "and" || t.lower == "then")
                    && tail
                        .get(k + 1)
                        .is_some_and(|n| verb_lemma(n, lex).is_some() || lex.is_first_person(&n.lower)))
        })
        .unwrap_or(tail.len());
    let tail = &tail[..end];

    // A preposition right after the verb is a particle: "tap on", "go to".
    let mut start = 0;
    if tail.first().is_some_and(|t| !t.quoted && lex.is_preposition(&t.lower)) {
        start = 1;
    }
    let body = &tail[start..];
    let prep_at = (1..body.len())
        .find(|&k| !body[k].quoted && lex.is_preposition(&body[k].lower) && !noun_phrase(&body[..k], lex).is_empty());
    match prep_at {
        Some(p) => {
            let object = noun_phrase(&body[..p], lex);
            let object2 = noun_phrase(&body[p + 1..], lex);
            if object2.is_empty() {
                (object, String::new(), String::new())
            } else {
                (object, body[p].lower.clone(), object2)
            }
        }
        None => (noun_phrase(body, lex), String::new(), String::new()),
    }
}

fn subject_text(clause: &Clause, lex: &Lexicon) -> String {
    if clause.first_person {
        "user".to_string()
    } else {
        noun_phrase(&clause.subject, lex)
    }
}

fn phrase_from_clause(clause: &Clause, raw: &str, lex: &Lexicon) -> ParsedPhrase {
    let (mut object, preposition, object2) = split_tail(&clause.tail, lex);
    let (action, verb) = if clause.passive {
        object = if object.is_empty() {
            clause.verb.text.clone()
        } else {
            format!("{} {object}", clause.verb.text)
        };
        ("is".to_string(), clause.verb.text.clone())
    } else {
        (clause.lemma.clone(), clause.verb.text.clone())
    };
    ParsedPhrase {
        subject: subject_text(clause, lex),
        action,
        verb,
        object,
        preposition,
        object2,
        raw: raw.to_string(),
    }
}

fn imperative_phrase(tokens: &[Token], raw: &str, lex: &Lexicon) -> Option<ParsedPhrase> {
    let i = imperative_verb(tokens, lex)?;
    let verb = &tokens[i];
    let (object, preposition, object2) = split_tail(&tokens[i + 1..], lex);
    Some(ParsedPhrase {
        subject: "user".into(),
        action: verb_lemma(verb, lex)?,
        verb: verb.text.clone(),
        object,
        preposition,
        object2,
        raw: raw.to_string(),
    })
}

/// Step phrase from a subordinate or standalone clause: imperative/gerund
/// or first-person declarative.
fn step_phrase(tokens: &[Token], raw: &str, lex: &Lexicon) -> Option<ParsedPhrase> {
    if let Some(p) = imperative_phrase(tokens, raw, lex) {
        return Some(p);
    }
    let clause = analyze_declarative(tokens, lex)?;
    clause.first_person.then(|| phrase_from_clause(&clause, raw, lex))
}

/// Parses the first sentence of `message` into a typed tuple.
///
/// Sentences that fit none of the patterns yield
/// [`NlpError::RephraseNeeded`] carrying the sentence.
pub fn parse(message: &str, lexicon: &Lexicon) -> Result<ParseOutcome, NlpError> {
    let lex = lexicon;
    let sentence = segment(message)?.swap_remove(0);
    let raw = sentence.as_str();
    let tokens = tokenize(raw, lex);
    let sentence_type = classify_tokens(&tokens, lex);
    let rephrase = || NlpError::RephraseNeeded(sentence.clone());
    let (ob_part, s2r_part) = match sentence_type {
        SentenceType::Unparseable => return Err(rephrase()),
        SentenceType::ConditionalWhen => {
            let (main, sub) = conditional_parts(&tokens, lex).ok_or_else(rephrase)?;
            let main_clause = analyze_declarative(&main, lex).ok_or_else(rephrase)?;
            let ob = phrase_from_clause(&main_clause, raw, lex);
            (Some(ob), step_phrase(&sub, raw, lex))
        }
        SentenceType::Imperative => {
            let phrase = imperative_phrase(&tokens, raw, lex)
                .or_else(|| {
                    leading_condition_then_imperative(&tokens, lex).and_then(|m| imperative_phrase(&m, raw, lex))
                })
                .ok_or_else(rephrase)?;
            (None, Some(phrase))
        }
        _ => {
            let clause = analyze_declarative(&tokens, lex).ok_or_else(rephrase)?;
            let phrase = phrase_from_clause(&clause, raw, lex);
            let is_step = matches!(
                sentence_type,
                SentenceType::DeclarativePast | SentenceType::DeclarativePresent
            ) && clause.first_person;
            if is_step {
                (None, Some(phrase))
            } else {
                (Some(phrase), None)
            }
        }
    };
    Ok(ParseOutcome {
        sentence_type,
        ob_part,
        s2r_part,
    })
}

fn numeric_literal(word: &str) -> bool {
    let core = word.trim_start_matches(['$', '€', '£']).trim_end_matches('%');
    !core.is_empty()
        && core.chars().any(|c| c.is_ascii_digit())
        && core
            .chars()
            .all(|c| c.is_ascii_digit() || c == '.' || c == ',' || c == '-')
}

fn first_quoted_span(raw: &str) -> Option<String> {
    let chars: Vec<char> = raw.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let single = c == '\'' && (i == 0 || !chars[i - 1].is_alphanumeric());
        if !(is_quote_open(c) || single) {
            continue;
        }
        let close = (i + 1..chars.len()).find(|&j| {
            let d = chars[j];
            (if single { d == '\'' } else { is_quote_close(d) })
                && chars.get(j + 1).is_none_or(|n| !n.is_alphanumeric())
        });
        if let Some(j) = close {
            let inner: String = chars[i + 1..j].iter().collect();
            let inner = inner.trim();
            if !inner.is_empty() {
                return Some(inner.to_string());
            }
        }
    }
    None
}

/// Literal input value of a type-like step: the first quoted span in the
/// sentence, else the first number (with the unit word that follows it) in
/// the object or object2. Generic placeholders ("text", "value") count as
/// absent.
pub fn extract_input_value(phrase: &ParsedPhrase, lexicon: &Lexicon) -> Option<String> {
    let value = first_quoted_span(&phrase.raw).or_else(|| {
        [&phrase.object, &phrase.object2].into_iter().find_map(|np| {
            let words: Vec<&str> = np.split_whitespace().collect();
            let at = words.iter().position(|w| numeric_literal(w))?;
            let unit = words.get(at + 1).filter(|u| {
                u.chars().all(char::is_alphabetic)
                    && !lexicon.is_stopword(u)
                    && !lexicon.is_preposition(u)
                    && !lexicon.is_widget_noun(u)
            });
            Some(match unit {
                Some(u) => format!("{} {u}", words[at]),
                None => words[at].to_string(),
            })
        })
    })?;
    (!lexicon.is_generic_value(&value)).then_some(value)
}
