use crate::graph::{DependencyGraph, GraphError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("manifest line {line}: dependency on undeclared class '{reference}'")]
    UndeclaredClass { line: usize, reference: String },
}

fn err(line: usize, reason: impl Into<String>) -> ManifestError {
    ManifestError::Parse {
        line,
        reason: reason.into(),
    }
}

fn split_reference(line: usize, token: &str) -> Result<(String, String), ManifestError> {
    match token.rsplit_once('.') {
        Some((pkg, class)) if !pkg.is_empty() && !class.is_empty() => {
            Ok((pkg.to_string(), class.to_string()))
        }
        _ => Err(err(
            line,
            format!("malformed class reference '{token}' (expected package.Class)"),
        )),
    }
}

/// Parses the line-oriented manifest format:
///
/// ```text
/// package <name>
/// class <pkg>.<Class> abstract|concrete
/// depends <pkg>.<Class> -> <pkg>.<Class>
/// # comment
/// ```
///
/// Declarations may appear in any order; line order never affects the
/// resulting metrics. At least one package must be declared.
pub fn parse_manifest(text: &str) -> Result<DependencyGraph, ManifestError> {
    struct Line<'t> {
        no: usize,
        words: Vec<&'t str>,
    }

    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let words: Vec<&str> = body.split_whitespace().collect();
        if !words.is_empty() {
            lines.push(Line {
                no: idx + 1,
                words,
            });
        }
    }

    let mut g = DependencyGraph::new();

    // Three passes (packages, classes, edges) make declaration order
    // irrelevant.
    for line in &lines {
        if line.words[0] == "package" {
            if line.words.len() != 2 {
                return Err(err(line.no, "expected 'package <name>'"));
            }
            g.add_package(line.words[1])
                .map_err(|e| err(line.no, e.to_string()))?;
        }
    }
    for line in &lines {
        if line.words[0] == "class" {
            if line.words.len() != 3 {
                return Err(err(
                    line.no,
                    "expected 'class <pkg>.<Class> abstract|concrete'",
                ));
            }
            let (pkg, class) = split_reference(line.no, line.words[1])?;
            let is_abstract = match line.words[2] {
                "abstract" => true,
                "concrete" => false,
                other => {
                    return Err(err(
                        line.no,
                        format!("expected 'abstract' or 'concrete', got '{other}'"),
                    ))
                }
            };
            g.add_class(&pkg, &class, is_abstract)
                .map_err(|e| err(line.no, e.to_string()))?;
        }
    }
    for line in &lines {
        match line.words[0] {
            "package" | "class" => {}
            "depends" => {
                if line.words.len() != 4 || line.words[2] != "->" {
                    return Err(err(
                        line.no,
                        "expected 'depends <pkg>.<Class> -> <pkg>.<Class>'",
                    ));
                }
                let from = line.words[1];
                let to = line.words[3];
                split_reference(line.no, from)?;
                split_reference(line.no, to)?;
                g.add_edge(from, to).map_err(|e| match e {
                    GraphError::UndeclaredClass(reference) => ManifestError::UndeclaredClass {
                        line: line.no,
                        reference,
                    },
                    other => err(line.no, other.to_string()),
                })?;
            }
            other => {
                return Err(err(line.no, format!("unknown directive '{other}'")));
            }
        }
    }

    if g.package_count() == 0 {
        return Err(err(0, "no packages declared"));
    }
    Ok(g)
}
