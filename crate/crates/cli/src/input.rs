//! Line-oriented input files.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet: 0 1
//! rule 0 -> 0 1
//! rule 1 -> 0 1 1 0
//! code 0 -> a
//! code 1 -> b
//! seed: 0
//! ```
//!
//! A two-sided seed is written `seed: b.a`.

use std::fmt;

use apseq::{Alphabet, Morphism, SeedPair, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisInput {
    pub sigma: Morphism,
    pub phi: Option<Morphism>,
    pub seed: Option<SeedPair>,
}

impl AnalysisInput {
    /// The coding, or the identity when none was given.
    pub fn coding(&self) -> Morphism {
        self.phi
            .clone()
            .unwrap_or_else(|| Morphism::identity(self.sigma.domain()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A whitespace-separated token with its 1-based position.
#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokens(line: &str, number: usize) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    line: number,
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Splits `head:` or `head: rest` forms, where the colon may be glued to
/// the keyword or to the first value.
fn keyword_values<'a>(toks: &[Token<'a>], keyword: &str) -> Option<Vec<Token<'a>>> {
    let first = toks.first()?;
    let rest = first.text.strip_prefix(keyword)?.strip_prefix(':')?;
    let mut values = Vec::new();
    if !rest.is_empty() {
        values.push(Token {
            text: rest,
            line: first.line,
            column: first.column + keyword.chars().count() + 1,
        });
    }
    values.extend_from_slice(&toks[1..]);
    Some(values)
}

struct Rule<'a> {
    head: Token<'a>,
    body: Vec<Token<'a>>,
}

fn arrow_rule<'a>(toks: &[Token<'a>], keyword: &Token<'a>) -> Result<Rule<'a>, ParseError> {
    match toks {
        [head, arrow, body @ ..] if arrow.text == "->" => {
            if body.is_empty() {
                Err(arrow.error("expected at least one symbol after '->'"))
            } else {
                Ok(Rule {
                    head: *head,
                    body: body.to_vec(),
                })
            }
        }
        [_, other, ..] => Err(other.error(format!("expected '->', found {:?}", other.text))),
        _ => Err(keyword.error(format!("expected '{} <symbol> -> ...'", keyword.text))),
    }
}

pub fn parse_input(text: &str) -> Result<AnalysisInput, ParseError> {
    let mut alphabet: Option<(Alphabet, Vec<Token<'_>>)> = None;
    let mut rules: Vec<Rule<'_>> = Vec::new();
    let mut codes: Vec<Rule<'_>> = Vec::new();
    let mut seed: Option<Token<'_>> = None;
    let mut last_line = 1;

    for (i, line) in text.lines().enumerate() {
        let toks = tokens(line, i + 1);
        last_line = i + 1;
        let Some(first) = toks.first().copied() else {
            continue;
        };
        if let Some(values) = keyword_values(&toks, "alphabet") {
            if alphabet.is_some() {
                return Err(first.error("alphabet declared twice"));
            }
            if values.is_empty() {
                return Err(first.error("alphabet needs at least one symbol"));
            }
            for (j, v) in values.iter().enumerate() {
                if v.text.contains("->") || v.text.contains(':') {
                    return Err(v.error(format!("invalid symbol {:?}", v.text)));
                }
                if values[..j].iter().any(|w| w.text == v.text) {
                    return Err(v.error(format!("symbol {:?} declared twice", v.text)));
                }
            }
            let a = Alphabet::new(values.iter().map(|v| v.text)).map_err(|e| first.error(e.to_string()))?;
            alphabet = Some((a, values));
        } else if let Some(values) = keyword_values(&toks, "seed") {
            if seed.is_some() {
                return Err(first.error("seed declared twice"));
            }
            match values.as_slice() {
                [v] => seed = Some(*v),
                [] => return Err(first.error("seed needs a symbol")),
                [_, extra, ..] => return Err(extra.error("seed takes a single token")),
            }
        } else if first.text == "rule" {
            rules.push(arrow_rule(&toks[1..], &first)?);
        } else if first.text == "code" {
            let rule = arrow_rule(&toks[1..], &first)?;
            if rule.body.len() != 1 {
                return Err(rule.body[1].error("a code maps a symbol to exactly one symbol"));
            }
            codes.push(rule);
        } else {
            return Err(first.error(format!(
                "unknown directive {:?}; expected alphabet:, rule, code or seed:",
                first.text
            )));
        }
    }

    let Some((alphabet, declared)) = alphabet else {
        return Err(ParseError {
            line: last_line,
            column: 1,
            message: "missing 'alphabet:' line".into(),
        });
    };
    let letter = |t: &Token<'_>| {
        alphabet
            .index_of(t.text)
            .ok_or_else(|| t.error(format!("undeclared symbol {:?}", t.text)))
    };

    let mut images: Vec<Option<Word>> = vec![None; alphabet.len()];
    for rule in &rules {
        let a = letter(&rule.head)?;
        if images[a].is_some() {
            return Err(rule.head.error(format!("second rule for {:?}", rule.head.text)));
        }
        let body = rule.body.iter().map(letter).collect::<Result<Vec<_>, _>>()?;
        images[a] = Some(Word::new(body));
    }
    let missing: Vec<&str> = alphabet
        .letters()
        .filter(|&a| images[a].is_none())
        .map(|a| alphabet.symbol(a))
        .collect();
    if !missing.is_empty() {
        return Err(declared[0].error(format!("no rule for {}", missing.join(", "))));
    }
    let images = images.into_iter().flatten().collect();
    let sigma = Morphism::new(alphabet.clone(), alphabet.clone(), images)
        .map_err(|e| declared[0].error(e.to_string()))?;

    let phi = if codes.is_empty() {
        None
    } else {
        let mut targets: Vec<Option<&str>> = vec![None; alphabet.len()];
        for code in &codes {
            let a = letter(&code.head)?;
            if targets[a].is_some() {
                return Err(code.head.error(format!("second code for {:?}", code.head.text)));
            }
            targets[a] = Some(code.body[0].text);
        }
        let missing: Vec<&str> = alphabet
            .letters()
            .filter(|&a| targets[a].is_none())
            .map(|a| alphabet.symbol(a))
            .collect();
        if !missing.is_empty() {
            return Err(codes[0].head.error(format!("coding has no code for {}", missing.join(", "))));
        }
        let pairs: Vec<(&str, &str)> = alphabet
            .letters()
            .map(|a| (alphabet.symbol(a), targets[a].unwrap_or_default()))
            .collect();
        Some(Morphism::coding_from_pairs(&alphabet, &pairs).map_err(|e| codes[0].head.error(e.to_string()))?)
    };

    let seed = seed
        .map(|t| parse_seed(&alphabet, &t))
        .transpose()?;

    Ok(AnalysisInput { sigma, phi, seed })
}

fn parse_seed(alphabet: &Alphabet, t: &Token<'_>) -> Result<SeedPair, ParseError> {
    if let Some(a) = alphabet.index_of(t.text) {
        return Ok(SeedPair::one_sided(a));
    }
    let undeclared = |s: &str| t.error(format!("undeclared symbol {s:?} in seed"));
    match t.text.split_once('.') {
        Some((b, a)) => {
            let b = alphabet.index_of(b).ok_or_else(|| undeclared(b))?;
            let a = alphabet.index_of(a).ok_or_else(|| undeclared(a))?;
            Ok(SeedPair::two_sided(b, a))
        }
        None => Err(undeclared(t.text)),
    }
}

/// Canonical text form; `parse_input(&serialize(x)) == x`.
pub fn serialize(input: &AnalysisInput) -> String {
    let sigma = &input.sigma;
    let alphabet = sigma.domain();
    let mut out = format!("alphabet: {}\n", alphabet.symbols().join(" "));
    for a in alphabet.letters() {
        let body: Vec<&str> = sigma.image(a).iter().map(|&b| alphabet.symbol(b)).collect();
        out.push_str(&format!("rule {} -> {}\n", alphabet.symbol(a), body.join(" ")));
    }
    if let Some(phi) = &input.phi {
        for a in alphabet.letters() {
            out.push_str(&format!(
                "code {} -> {}\n",
                alphabet.symbol(a),
                phi.codomain().symbol(phi.code(a))
            ));
        }
    }
    if let Some(seed) = &input.seed {
        out.push_str(&format!("seed: {}\n", seed.render(alphabet)));
    }
    out
}
