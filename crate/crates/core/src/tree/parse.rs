use super::{Activity, Operator, ProcessTree, TreeError};

/// Non-fatal findings while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseWarning {
    /// An operator with a single child; `reduce_tree` collapses it.
    UnaryOperator { position: usize, operator: Operator },
}

/// Parses the textual notation, e.g. `->(*(X(->(a,b),+(c,d)),tau),+(e,a))`.
///
/// Labels that are not plain identifiers may be written as double-quoted
/// strings (`"place order"`).
pub fn parse_tree(text: &str) -> Result<ProcessTree, TreeError> {
    parse_tree_with_warnings(text).map(|(t, _)| t)
}

pub fn parse_tree_with_warnings(text: &str) -> Result<(ProcessTree, Vec<ParseWarning>), TreeError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, warnings: Vec::new() };
    let tree = p.tree()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((tree, p.warnings))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    warnings: Vec<ParseWarning>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TreeError {
        TreeError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_after_ws(&self, from: usize) -> Option<u8> {
        self.src[from..].iter().copied().find(|b| !b.is_ascii_whitespace())
    }

    fn tree(&mut self) -> Result<ProcessTree, TreeError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input, expected a tree")),
            Some(b'-') => {
                if self.src.get(self.pos + 1) == Some(&b'>') {
                    self.pos += 2;
                    self.operator_body(Operator::Sequence, start)
                } else {
                    Err(self.error("expected '->'"))
                }
            }
            Some(b'+') => {
                self.pos += 1;
                self.operator_body(Operator::Parallel, start)
            }
            Some(b'*') => {
                self.pos += 1;
                self.operator_body(Operator::Loop, start)
            }
            Some(b'"') => Ok(ProcessTree::leaf(self.quoted()?)),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let ident = self.identifier();
                if ident == "X" && self.peek_after_ws(self.pos) == Some(b'(') {
                    return self.operator_body(Operator::Choice, start);
                }
                if ident == "tau" {
                    Ok(ProcessTree::tau())
                } else {
                    Ok(ProcessTree::leaf(Activity::new(ident)))
                }
            }
            Some(_) => Err(self.error("expected an operator or a leaf label")),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn quoted(&mut self) -> Result<String, TreeError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => {
                    self.pos = start;
                    return Err(self.error("unterminated quoted label"));
                }
                Some(b'"') => {
                    self.pos += 1;
                    break;
                }
                Some(b'\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ (b'"' | b'\\')) => out.push(c),
                        _ => return Err(self.error("invalid escape in quoted label")),
                    }
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
        if out.is_empty() {
            self.pos = start;
            return Err(self.error("empty quoted label"));
        }
        String::from_utf8(out).map_err(|_| self.error("quoted label is not valid UTF-8"))
    }

    fn operator_body(&mut self, op: Operator, start: usize) -> Result<ProcessTree, TreeError> {
        self.skip_ws();
        if self.peek() != Some(b'(') {
            return Err(self.error("expected '('"));
        }
        self.pos += 1;
        self.skip_ws();
        if self.peek() == Some(b')') {
            return Err(TreeError::EmptyOperator { position: start });
        }
        let mut children = vec![self.tree()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    children.push(self.tree()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
        if op == Operator::Loop && children.len() != 2 {
            return Err(TreeError::LoopArity { position: start, found: children.len() });
        }
        if children.len() == 1 {
            self.warnings.push(ParseWarning::UnaryOperator { position: start, operator: op });
        }
        ProcessTree::operator(op, children)
    }
}

fn is_plain_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && s != "tau"
}

pub(super) fn write_activity(a: &Activity, out: &mut String) {
    let s = a.as_str();
    if is_plain_identifier(s) {
        out.push_str(s);
    } else {
        out.push('"');
        for ch in s.chars() {
            if ch == '"' || ch == '\\' {
                out.push('\\');
            }
            out.push(ch);
        }
        out.push('"');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{Label, NodeId};

    #[test]
    fn smallest_sequence() {
        let t = parse_tree("->(a,b)").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.root_label(), &Label::Operator(Operator::Sequence));
        assert_eq!(t.label(NodeId(1)), &Label::Activity("a".into()));
        assert_eq!(t.label(NodeId(2)), &Label::Activity("b".into()));
        assert_eq!(t.to_string(), "->(a,b)");
    }

    #[test]
    fn running_example_tree() {
        let t = parse_tree(" -> ( *( X(->(a,b), +(c,d)), tau ), +(e,a) ) ").unwrap();
        assert_eq!(t.to_string(), "->(*(X(->(a,b),+(c,d)),tau),+(e,a))");
        assert_eq!(t.to_pretty_string(), "→(↻(×(→(a,b),∧(c,d)),τ),∧(e,a))");
    }

    #[test]
    fn loop_arity_is_enforced() {
        assert_eq!(parse_tree("*(a,b,c)"), Err(TreeError::LoopArity { position: 0, found: 3 }));
        assert!(matches!(parse_tree("->(a,*(b))"), Err(TreeError::LoopArity { position: 5, found: 1 })));
    }

    #[test]
    fn empty_operator_and_syntax_errors() {
        assert_eq!(parse_tree("X()"), Err(TreeError::EmptyOperator { position: 0 }));
        assert!(matches!(parse_tree("->(a,b"), Err(TreeError::Syntax { position: 6, .. })));
        assert!(matches!(parse_tree("->(a,,b)"), Err(TreeError::Syntax { position: 5, .. })));
        assert!(matches!(parse_tree("a b"), Err(TreeError::Syntax { position: 2, .. })));
        assert!(matches!(parse_tree(""), Err(TreeError::Syntax { position: 0, .. })));
        assert!(matches!(parse_tree("-(a)"), Err(TreeError::Syntax { .. })));
    }

    #[test]
    fn unary_operators_warn() {
        let (t, w) = parse_tree_with_warnings("->(a)").unwrap();
        assert_eq!(t.unary_operators(), vec![NodeId(0)]);
        assert_eq!(w, vec![ParseWarning::UnaryOperator { position: 0, operator: Operator::Sequence }]);
    }

    #[test]
    fn x_is_a_leaf_unless_followed_by_paren() {
        let t = parse_tree("X(X,Y)").unwrap();
        assert_eq!(t.root_label(), &Label::Operator(Operator::Choice));
        assert_eq!(t.label(NodeId(1)), &Label::Activity("X".into()));
        assert_eq!(t.to_string(), "X(X,Y)");
    }

    #[test]
    fn quoted_labels() {
        let t = parse_tree(r#"->("place order","tau",a_1)"#).unwrap();
        assert_eq!(t.label(NodeId(1)), &Label::Activity("place order".into()));
        assert_eq!(t.label(NodeId(2)), &Label::Activity("tau".into()));
        assert_eq!(t.to_string(), r#"->("place order","tau",a_1)"#);
        assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
        assert!(parse_tree(r#""""#).is_err());
        assert!(parse_tree(r#""abc"#).is_err());
    }
}
