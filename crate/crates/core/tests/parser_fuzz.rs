use proptest::prelude::*;

use qvtop_core::harness::{D_CONNECTED, T0_NOT_T1};
use qvtop_core::io::{load, parse_document, LoadError};
use qvtop_core::Limits;

#[derive(Debug, Clone)]
enum Edit {
    Delete(usize),
    Insert(usize, char),
    Replace(usize, char),
    DropLine(usize),
    DuplicateLine(usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    let ch = prop::sample::select(vec!['a', 'z', '0', '1', '/', '{', '}', '=', ':', '<', ' ', '\n', '#', '-', ',', '*']);
    prop_oneof![
        any::<usize>().prop_map(Edit::Delete),
        (any::<usize>(), ch.clone()).prop_map(|(i, c)| Edit::Insert(i, c)),
        (any::<usize>(), ch).prop_map(|(i, c)| Edit::Replace(i, c)),
        any::<usize>().prop_map(Edit::DropLine),
        any::<usize>().prop_map(Edit::DuplicateLine),
    ]
}

fn apply(text: &str, edits: &[Edit]) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for e in edits {
        match *e {
            Edit::Delete(i) if !chars.is_empty() => {
                chars.remove(i % chars.len());
            }
            Edit::Insert(i, c) => chars.insert(i % (chars.len() + 1), c),
            Edit::Replace(i, c) if !chars.is_empty() => {
                let k = i % chars.len();
                chars[k] = c;
            }
            Edit::DropLine(i) | Edit::DuplicateLine(i) => {
                let s: String = chars.iter().collect();
                let mut lines: Vec<&str> = s.lines().collect();
                if lines.is_empty() {
                    continue;
                }
                let k = i % lines.len();
                if matches!(e, Edit::DropLine(_)) {
                    lines.remove(k);
                } else {
                    lines.insert(k, lines[k]);
                }
                chars = (lines.join("\n") + "\n").chars().collect();
            }
            _ => {}
        }
    }
    chars.into_iter().collect()
}

fn fixture() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![T0_NOT_T1, D_CONNECTED])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mutated_documents_never_panic(text in fixture(), edits in prop::collection::vec(edit(), 1..6)) {
        let mutated = apply(text, &edits);
        let lines: Vec<&str> = mutated.lines().collect();
        if let Err(diags) = parse_document(&mutated) {
            prop_assert!(!diags.is_empty());
            for d in &diags {
                // spans are 1-based and stay on a line of the input
                prop_assert!(d.span.line >= 1 && d.span.line <= lines.len() + 1, "{:?}", d);
                let width = lines.get(d.span.line - 1).map_or(0, |l| l.chars().count());
                prop_assert!(d.span.col >= 1 && d.span.col + d.span.len <= width + 2, "{:?} in {:?}", d, lines.get(d.span.line - 1));
            }
        }
        match load(&mutated, &Limits::default()) {
            Ok(_) | Err(LoadError::Parse(_)) | Err(LoadError::Invalid(_)) | Err(LoadError::SizeGuard(_)) => {}
        }
    }
}
