//! graph6 encoding: a size header followed by the column-wise upper triangle
//! packed big-endian into 6-bit groups, each offset by 63.

use thiserror::Error;

use crate::graph::{Graph, VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("malformed graph6 header")]
    MalformedHeader,
    #[error("graph6 order {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("byte {byte} at offset {offset} is outside the printable range 63..=126")]
    ByteOutOfRange { offset: usize, byte: u8 },
    #[error("graph6 body is truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after the graph6 body")]
    TrailingGarbage(usize),
    #[error("non-zero padding bits in the last graph6 byte")]
    NonZeroPadding,
}

fn sextet(offset: usize, byte: u8) -> Result<u8, Graph6Error> {
    if (63..=126).contains(&byte) {
        Ok(byte - 63)
    } else {
        Err(Graph6Error::ByteOutOfRange { offset, byte })
    }
}

pub fn parse_graph6(text: &[u8]) -> Result<Graph, Graph6Error> {
    let (n, header_len) = match text {
        [] => return Err(Graph6Error::MalformedHeader),
        [126, 126, ..] => {
            // Eight-byte form only encodes n >= 258048.
            if text.len() < 8 {
                return Err(Graph6Error::MalformedHeader);
            }
            let mut n = 0usize;
            for (i, &b) in text[2..8].iter().enumerate() {
                n = (n << 6) | sextet(i + 2, b)? as usize;
            }
            return Err(Graph6Error::TooManyVertices(n));
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Graph6Error::MalformedHeader);
            }
            let mut n = 0usize;
            for (i, &b) in rest[..3].iter().enumerate() {
                n = (n << 6) | sextet(i + 1, b)? as usize;
            }
            if n <= 62 {
                return Err(Graph6Error::MalformedHeader);
            }
            (n, 4)
        }
        [b, ..] => (sextet(0, *b)? as usize, 1),
    };
    if n > MAX_VERTICES {
        return Err(Graph6Error::TooManyVertices(n));
    }
    let bits = n * n.saturating_sub(1) / 2;
    let body_len = bits.div_ceil(6);
    let body = &text[header_len..];
    if body.len() < body_len {
        return Err(Graph6Error::Truncated {
            expected: body_len,
            found: body.len(),
        });
    }
    if body.len() > body_len {
        return Err(Graph6Error::TrailingGarbage(body.len() - body_len));
    }

    let mut rows = vec![VertexSet::new(); n];
    let mut k = 0usize;
    let (mut i, mut j) = (0usize, 1usize);
    for (offset, &byte) in body.iter().enumerate() {
        let value = sextet(header_len + offset, byte)?;
        for shift in (0..6).rev() {
            let bit = (value >> shift) & 1 == 1;
            if k < bits {
                if bit {
                    rows[i].insert(j);
                    rows[j].insert(i);
                }
                i += 1;
                if i == j {
                    i = 0;
                    j += 1;
                }
            } else if bit {
                return Err(Graph6Error::NonZeroPadding);
            }
            k += 1;
        }
    }
    Ok(Graph::from_rows(rows).expect("graph6 decoding yields a simple graph"))
}

pub fn emit_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = Vec::with_capacity(4 + (n * n) / 12 + 1);
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        let column = g.neighbors(j);
        for i in 0..j {
            acc = (acc << 1) | column.contains(i) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 output is ASCII")
}

/// Parses one graph per non-empty line; `>>graph6<<` prefixes are accepted.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>, (usize, Graph6Error)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.trim_end_matches('\r')))
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
            parse_graph6(line.as_bytes()).map_err(|e| (i + 1, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_encodes_as_bw() {
        assert_eq!(emit_graph6(&Graph::complete(3).unwrap()), "Bw");
        assert_eq!(parse_graph6(b"Bw").unwrap(), Graph::complete(3).unwrap());
    }

    #[test]
    fn empty_three() {
        assert_eq!(parse_graph6(b"B?").unwrap(), Graph::empty(3).unwrap());
        assert_eq!(emit_graph6(&Graph::empty(0).unwrap()), "?");
        assert_eq!(parse_graph6(b"?").unwrap(), Graph::empty(0).unwrap());
        assert_eq!(emit_graph6(&Graph::empty(1).unwrap()), "@");
    }

    #[test]
    fn known_encodings() {
        // Reference strings produced by standard graph6 writers.
        assert_eq!(emit_graph6(&Graph::path(4).unwrap()), "Ch");
        assert_eq!(emit_graph6(&Graph::cycle(5).unwrap()), "Dhc");
        assert_eq!(emit_graph6(&Graph::complete(5).unwrap()), "D~{");
    }

    #[test]
    fn long_header() {
        let g = Graph::empty(63).unwrap();
        let s = emit_graph6(&g);
        assert_eq!(&s.as_bytes()[..4], &[126, 63, 63, 126]);
        assert_eq!(parse_graph6(s.as_bytes()).unwrap(), g);
        let g = Graph::complete(1024).unwrap();
        assert_eq!(parse_graph6(emit_graph6(&g).as_bytes()).unwrap(), g);
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_graph6(b""), Err(Graph6Error::MalformedHeader));
        assert_eq!(parse_graph6(b"~?"), Err(Graph6Error::MalformedHeader));
        // Long form may not encode n <= 62.
        assert_eq!(parse_graph6(b"~??B"), Err(Graph6Error::MalformedHeader));
        assert_eq!(
            parse_graph6(b"B "),
            Err(Graph6Error::ByteOutOfRange { offset: 1, byte: b' ' })
        );
        assert_eq!(
            parse_graph6(b"\x7fw"),
            Err(Graph6Error::ByteOutOfRange { offset: 0, byte: 0x7f })
        );
        assert_eq!(parse_graph6(b"Bww"), Err(Graph6Error::TrailingGarbage(1)));
        assert_eq!(
            parse_graph6(b"D~"),
            Err(Graph6Error::Truncated { expected: 2, found: 1 })
        );
        assert_eq!(parse_graph6(b"B@"), Err(Graph6Error::NonZeroPadding));
        assert_eq!(
            parse_graph6(b"~?O@"),
            Err(Graph6Error::TooManyVertices(1025))
        );
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=30);
            let p: f64 = rng.gen();
            let mut edges = Vec::new();
            for v in 1..n {
                for u in 0..v {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let text = emit_graph6(&g);
            assert_eq!(parse_graph6(text.as_bytes()).unwrap(), g);
        }
    }

    #[test]
    fn line_reader() {
        let graphs = parse_graph6_lines("Bw\n\n>>graph6<<B?\r\n").unwrap();
        assert_eq!(graphs.len(), 2);
        assert_eq!(parse_graph6_lines("Bw\nB ").unwrap_err().0, 2);
    }
}
