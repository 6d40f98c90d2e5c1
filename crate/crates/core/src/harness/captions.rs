//! Cleanup of automatically generated captions before text embedding.

use std::sync::LazyLock;

use regex::Regex;

static BW_PHOTO: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bblack\s+and\s+white\s+photos?\b").unwrap());

/// Drops tokens starting with "ara" (case-insensitive), removes the phrases
/// "black and white photo(s)" and collapses whitespace. Idempotent.
pub fn clean_caption(text: &str) -> String {
    let mut current = text.to_owned();
    loop {
        let without_phrase = BW_PHOTO.replace_all(&current, " ");
        let next = without_phrase
            .split_whitespace()
            .filter(|token| !token.to_lowercase().starts_with("ara"))
            .collect::<Vec<_>>()
            .join(" ");
        // Removing a phrase can splice a new one together; repeat to a fixpoint.
        if next == current {
            return next;
        }
        current = next;
    }
}

/// Cleans every caption of a prompts file (`id<TAB>caption` per line).
/// Lines without a tab are treated as a bare caption; blank lines are kept.
pub fn clean_prompts(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        match line.split_once('\t') {
            Some((id, caption)) => {
                out.push_str(id);
                out.push('\t');
                out.push_str(&clean_caption(caption));
            }
            None => out.push_str(&clean_caption(line)),
        }
        out.push('\n');
    }
    out
}

/// Parses `id<TAB>caption` lines, skipping blank ones.
pub fn parse_prompts(text: &str) -> Result<Vec<(String, String)>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_once('\t')
                .map(|(id, c)| (id.to_owned(), c.to_owned()))
                .ok_or_else(|| format!("line {}: expected id<TAB>caption", i + 1))
        })
        .collect()
}
