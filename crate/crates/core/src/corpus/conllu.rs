use std::path::Path;

use super::{Sentence, Token};
use crate::error::{Error, Result};
use crate::io::read_to_string;

/// Which column of a dependency-parse file supplies the part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosColumn {
    /// Universal tags, column 4.
    Upos,
    /// Language-specific tags, column 5.
    Xpos,
}

/// Parses a 10-column tab-separated dependency file into sentences grouped by
/// the `# doc_id = <id>` comments that precede them. Multiword-token ranges
/// (ids like `1-2`) are skipped; any other malformed line fails with its line
/// number. Returns groups in first-seen document order.
pub fn parse_conllu(path: &Path, pos_col: PosColumn) -> Result<Vec<(String, Vec<Sentence>)>> {
    parse_conllu_str(&read_to_string(path)?, pos_col)
}

pub fn parse_conllu_str(
    content: &str,
    pos_col: PosColumn,
) -> Result<Vec<(String, Vec<Sentence>)>> {
    let mut groups: Vec<(String, Vec<Sentence>)> = Vec::new();
    let mut group_of: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut current_doc: Option<String> = None;
    // (token, source line) pairs for the sentence being read
    let mut pending: Vec<(Token, usize)> = Vec::new();

    let flush = |groups: &mut Vec<(String, Vec<Sentence>)>,
                 group_of: &mut std::collections::HashMap<String, usize>,
                 current_doc: &Option<String>,
                 pending: &mut Vec<(Token, usize)>|
     -> Result<()> {
        if pending.is_empty() {
            return Ok(());
        }
        let len = pending.len();
        for (i, (token, line)) in pending.iter().enumerate() {
            if let Some(head) = token.head {
                if head > len {
                    return Err(Error::HeadOutOfRange {
                        line: *line,
                        head,
                        len,
                    });
                }
                if head == i + 1 {
                    return Err(Error::ConlluField {
                        line: *line,
                        msg: format!("token {} is its own head", i + 1),
                    });
                }
            }
        }
        let doc = current_doc.as_ref().expect("doc id checked per token line");
        let idx = *group_of.entry(doc.clone()).or_insert_with(|| {
            groups.push((doc.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[idx].1.push(Sentence {
            tokens: pending.drain(..).map(|(t, _)| t).collect(),
            sentiment: None,
            phrases: Vec::new(),
        });
        Ok(())
    };

    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            flush(&mut groups, &mut group_of, &current_doc, &mut pending)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("doc_id") {
                let value = value.trim_start();
                let value = value.strip_prefix('=').unwrap_or(value).trim();
                if value.is_empty() {
                    return Err(Error::ConlluField {
                        line: line_no,
                        msg: "empty doc_id".into(),
                    });
                }
                if !pending.is_empty() {
                    return Err(Error::ConlluField {
                        line: line_no,
                        msg: "doc_id comment inside a sentence".into(),
                    });
                }
                current_doc = Some(value.to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::ConlluColumns {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') {
            continue; // multiword-token range; the word-level lines follow
        }
        let id: usize = cols[0].parse().map_err(|_| Error::ConlluField {
            line: line_no,
            msg: format!("unsupported token id {:?}", cols[0]),
        })?;
        if id != pending.len() + 1 {
            return Err(Error::ConlluField {
                line: line_no,
                msg: format!("non-sequential token id {id}, expected {}", pending.len() + 1),
            });
        }
        if current_doc.is_none() {
            return Err(Error::ConlluField {
                line: line_no,
                msg: "token line before any doc_id comment".into(),
            });
        }
        let pos_field = match pos_col {
            PosColumn::Upos => cols[3],
            PosColumn::Xpos => cols[4],
        };
        let head = match cols[6] {
            "_" => None,
            raw => Some(raw.parse::<usize>().map_err(|_| Error::ConlluField {
                line: line_no,
                msg: format!("invalid head {raw:?}"),
            })?),
        };
        let token = Token {
            surface: cols[1].to_string(),
            pos: opt_field(pos_field),
            head,
            deprel: opt_field(cols[7]),
        };
        pending.push((token, line_no));
    }
    flush(&mut groups, &mut group_of, &current_doc, &mut pending)?;
    Ok(groups)
}

fn opt_field(raw: &str) -> Option<String> {
    if raw == "_" {
        None
    } else {
        Some(raw.to_string())
    }
}

/// Serializes parsed groups back to the 10-column format. The tag is written
/// to both part-of-speech columns; fields without a value become `_`.
pub fn write_conllu(groups: &[(String, Vec<Sentence>)]) -> String {
    let mut out = String::new();
    for (doc_id, sentences) in groups {
        out.push_str(&format!("# doc_id = {doc_id}\n"));
        for sentence in sentences {
            for (i, token) in sentence.tokens.iter().enumerate() {
                let pos = token.pos.as_deref().unwrap_or("_");
                let head = token
                    .head
                    .map(|h| h.to_string())
                    .unwrap_or_else(|| "_".to_string());
                let deprel = token.deprel.as_deref().unwrap_or("_");
                out.push_str(&format!(
                    "{}\t{}\t_\t{}\t{}\t_\t{}\t{}\t_\t_\n",
                    i + 1,
                    token.surface,
                    pos,
                    pos,
                    head,
                    deprel
                ));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
# doc_id = a
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tbarks\tbark\tVERB\tVBZ\t_\t0\troot\t_\t_

# doc_id = b
1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_
2\tnot\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_
3\tstop\tstop\tVERB\tVB\t_\t0\troot\t_\t_
";

    #[test]
    fn parses_groups_by_doc_id_and_skips_ranges() {
        let groups = parse_conllu_str(FIXTURE, PosColumn::Upos).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "a");
        assert_eq!(groups[0].1[0].tokens.len(), 3);
        assert_eq!(groups[1].0, "b");
        let b = &groups[1].1[0];
        assert_eq!(b.tokens.len(), 3, "range line must not produce a token");
        assert_eq!(b.tokens[0].surface, "do");
        assert_eq!(b.tokens[0].head, Some(3));
        assert_eq!(b.tokens[2].deprel.as_deref(), Some("root"));
    }

    #[test]
    fn pos_column_selects_upos_or_xpos() {
        let upos = parse_conllu_str(FIXTURE, PosColumn::Upos).unwrap();
        assert_eq!(upos[0].1[0].tokens[1].pos.as_deref(), Some("NOUN"));
        let xpos = parse_conllu_str(FIXTURE, PosColumn::Xpos).unwrap();
        assert_eq!(xpos[0].1[0].tokens[1].pos.as_deref(), Some("NN"));
    }

    #[test]
    fn wrong_column_count_reports_line_number() {
        let bad = "# doc_id = a\n1\tword\tonly\tfour\tcols\n";
        let err = parse_conllu_str(bad, PosColumn::Upos).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("found 5"), "{err}");
    }

    #[test]
    fn head_out_of_range_reports_line_number() {
        let bad = "# doc_id = a\n1\tword\t_\tX\tX\t_\t9\tdep\t_\t_\n";
        let err = parse_conllu_str(bad, PosColumn::Upos).unwrap_err();
        assert!(err.to_string().contains("head index 9"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn self_loop_is_rejected() {
        let bad = "# doc_id = a\n1\tword\t_\tX\tX\t_\t1\tdep\t_\t_\n";
        let err = parse_conllu_str(bad, PosColumn::Upos).unwrap_err();
        assert!(err.to_string().contains("own head"), "{err}");
    }

    #[test]
    fn token_before_doc_id_is_rejected() {
        let bad = "1\tword\t_\tX\tX\t_\t0\troot\t_\t_\n";
        let err = parse_conllu_str(bad, PosColumn::Upos).unwrap_err();
        assert!(err.to_string().contains("doc_id"), "{err}");
    }

    #[test]
    fn round_trip_preserves_structure() {
        let groups = parse_conllu_str(FIXTURE, PosColumn::Xpos).unwrap();
        let rendered = write_conllu(&groups);
        let back = parse_conllu_str(&rendered, PosColumn::Upos).unwrap();
        assert_eq!(back.len(), groups.len());
        for ((id_a, sents_a), (id_b, sents_b)) in groups.iter().zip(back.iter()) {
            assert_eq!(id_a, id_b);
            assert_eq!(sents_a.len(), sents_b.len());
            for (sa, sb) in sents_a.iter().zip(sents_b.iter()) {
                assert_eq!(sa.tokens.len(), sb.tokens.len());
                for (ta, tb) in sa.tokens.iter().zip(sb.tokens.iter()) {
                    assert_eq!(ta.surface, tb.surface);
                    assert_eq!(ta.head, tb.head);
                    assert_eq!(ta.deprel, tb.deprel);
                }
            }
        }
    }
}
