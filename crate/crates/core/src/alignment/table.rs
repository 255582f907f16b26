use super::{Alignment, MoveKind};

/// Two-row text table: trace row on top, running-sequence row below, one
/// column per move. A third row marks deviations (`L` log move, `M`
/// visible model move).
pub fn render_table(al: &Alignment) -> String {
    let cols: Vec<(String, String, &str)> = al
        .moves
        .iter()
        .map(|m| {
            let top = m.log.as_ref().map_or("≫".to_string(), |a| a.to_string());
            let bottom = m.model.as_ref().map_or("≫".to_string(), |s| s.to_string());
            let mark = match m.kind() {
                MoveKind::LogMove => "L",
                MoveKind::VisibleModelMove => "M",
                _ => "",
            };
            (top, bottom, mark)
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .map(|(a, b, _)| a.chars().count().max(b.chars().count()))
        .collect();
    let row = |f: &dyn Fn(&(String, String, &str)) -> String| -> String {
        let mut out = String::from("|");
        for (c, w) in cols.iter().zip(&widths) {
            let cell = f(c);
            let pad = w - cell.chars().count();
            out.push(' ');
            out.push_str(&cell);
            out.push_str(&" ".repeat(pad));
            out.push_str(" |");
        }
        out
    };
    let mut out = row(&|c| c.0.clone());
    out.push('\n');
    out.push_str(&row(&|c| c.1.clone()));
    out.push('\n');
    out.push_str(&row(&|c| c.2.to_string()));
    out.push('\n');
    out.push_str(&format!("cost: {}\n", al.cost));
    out
}

#[cfg(test)]
mod tests {
    use crate::alignment::optimal_alignment;
    use crate::semantics::Trace;
    use crate::tree::parse_tree;

    #[test]
    fn table_has_one_column_per_move() {
        let t = parse_tree("->(a,b)").unwrap();
        let al = optimal_alignment(&t, &Trace::parse("a,c")).unwrap();
        let table = al.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].matches('|').count(), al.moves.len() + 1);
        assert!(lines[0].contains(" c "));
        assert!(lines[1].contains("(n2,b)"));
        assert_eq!(lines[3], "cost: 2");
    }
}
