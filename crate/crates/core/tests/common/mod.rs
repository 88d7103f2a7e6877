//! Random process generators shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use ipa_eval::{Argument, BoundingBox, ElementRef, GrayMatrix, ImageRef, Process, Statement};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ACTIONS: &[&str] = &["click", "type", "open", "hotkey", "drag", "Click", "_wait", "img", "scroll-2"];
pub const IDS: &[&str] = &["I1", "I2", "mail", "sheet", "a", "b_2", "x-y", "0"];
pub const SYMBOLS: &[&str] = &["", "hello", "42", "a \"quoted\" word", "back\\slash", "line\nbreak", "tab\there", "ünï ✓", "(a, b)", "@I1.x"];
pub const PATHS: &[&str] = &["icons/send.png", "a b.png", "q\"uote.png", "img.png"];

fn random_char(rng: &mut impl Rng) -> char {
    match rng.gen_range(0..4) {
        0 => *[' ', '"', '\\', '\n', '\r', '\t', ',', '(', ')', '@', '.', '#'].choose(rng).unwrap(),
        1 => rng.gen_range('a'..='z'),
        2 => rng.gen::<char>(),
        _ => rng.gen_range('0'..='9'),
    }
}

fn random_ident(rng: &mut impl Rng) -> String {
    if rng.gen_bool(0.7) {
        return IDS.choose(rng).unwrap().to_string();
    }
    const CHARS: &[u8] = b"abcXYZ019_-";
    let len = rng.gen_range(1..6);
    (0..len).map(|_| *CHARS.choose(rng).unwrap() as char).collect()
}

fn random_box(rng: &mut impl Rng) -> BoundingBox {
    let x0 = rng.gen_range(0..50);
    let y0 = rng.gen_range(0..50);
    BoundingBox::new(x0, y0, x0 + rng.gen_range(0..20), y0 + rng.gen_range(0..20)).unwrap()
}

pub fn random_argument(rng: &mut impl Rng) -> Argument {
    match rng.gen_range(0..3) {
        0 => {
            let mut e = ElementRef::new(random_ident(rng), random_ident(rng)).unwrap();
            if rng.gen_bool(0.3) {
                e = e.with_bounding_box(random_box(rng));
            }
            Argument::Element(e)
        }
        1 => {
            if rng.gen_bool(0.6) {
                Argument::symbol(*SYMBOLS.choose(rng).unwrap())
            } else {
                let len = rng.gen_range(0..10);
                Argument::symbol((0..len).map(|_| random_char(rng)).collect::<String>())
            }
        }
        _ => {
            let mut img = ImageRef::new(*PATHS.choose(rng).unwrap());
            if rng.gen_bool(0.5) {
                img = img.with_bounding_box(random_box(rng));
            }
            if rng.gen_bool(0.3) {
                let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..4));
                let data = (0..r * c).map(|_| f64::from(rng.gen_range(0u8..=255))).collect();
                img = img.with_pixels(GrayMatrix::new(r, c, data).unwrap());
            }
            Argument::Image(img)
        }
    }
}

pub fn random_statement(rng: &mut impl Rng) -> Statement {
    let action = if rng.gen_bool(0.8) {
        ACTIONS.choose(rng).unwrap().to_string()
    } else {
        format!("f{}", random_ident(rng))
    };
    let arity = rng.gen_range(0..=4);
    Statement::new(action, (0..arity).map(|_| random_argument(rng)).collect()).unwrap()
}

pub fn random_process(rng: &mut impl Rng, max_len: usize) -> Process {
    let len = rng.gen_range(0..=max_len);
    Process::new((0..len).map(|_| random_statement(rng)).collect())
}

pub fn arb_ident() -> impl Strategy<Value = String> {
    prop_oneof![prop::sample::select(IDS).prop_map(str::to_string), "[A-Za-z0-9_-]{1,6}"]
}

pub fn arb_box() -> impl Strategy<Value = BoundingBox> {
    (0u32..40, 0u32..40, 0u32..15, 0u32..15).prop_map(|(x, y, w, h)| BoundingBox::new(x, y, x + w, y + h).unwrap())
}

pub fn arb_symbol() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(SYMBOLS).prop_map(str::to_string),
        prop::collection::vec(any::<char>(), 0..8).prop_map(|cs| cs.into_iter().collect()),
    ]
}

pub fn arb_argument() -> impl Strategy<Value = Argument> {
    prop_oneof![
        (arb_ident(), arb_ident(), prop::option::of(arb_box())).prop_map(|(i, e, bb)| {
            let mut el = ElementRef::new(i, e).unwrap();
            if let Some(bb) = bb {
                el = el.with_bounding_box(bb);
            }
            Argument::Element(el)
        }),
        arb_symbol().prop_map(Argument::Symbol),
        (prop_oneof![prop::sample::select(PATHS).prop_map(str::to_string), arb_symbol()], prop::option::of(arb_box()))
            .prop_map(|(p, bb)| {
                let mut img = ImageRef::new(p);
                if let Some(bb) = bb {
                    img = img.with_bounding_box(bb);
                }
                Argument::Image(img)
            }),
    ]
}

pub fn arb_action() -> impl Strategy<Value = String> {
    prop_oneof![prop::sample::select(ACTIONS).prop_map(str::to_string), "[A-Za-z_][A-Za-z0-9_-]{0,6}"]
}

pub fn arb_statement() -> impl Strategy<Value = Statement> {
    (arb_action(), prop::collection::vec(arb_argument(), 0..4))
        .prop_map(|(a, args)| Statement::new(a, args).unwrap())
}

pub fn arb_process(max_len: usize) -> impl Strategy<Value = Process> {
    prop::collection::vec(arb_statement(), 0..=max_len).prop_map(Process::new)
}

/// Every file under `root`, relative path plus contents, in sorted order.
pub fn read_tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(&p, root, out);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out
}

/// Gold-as-submission directory built straight from the task files: each
/// `gold.ipa` copied verbatim and the step sentences joined as text.
pub fn gold_submissions(fixtures: &Path, dest: &Path) {
    fs::create_dir_all(dest).unwrap();
    for entry in fs::read_dir(fixtures.join("tasks")).unwrap() {
        let dir = entry.unwrap().path();
        let id = dir.file_name().unwrap().to_str().unwrap().to_string();
        fs::copy(dir.join("gold.ipa"), dest.join(format!("{id}.ipa"))).unwrap();
        let steps: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("steps.json")).unwrap()).unwrap();
        let text: Vec<&str> = steps.as_array().unwrap().iter().map(|s| s["sentence"].as_str().unwrap()).collect();
        fs::write(dest.join(format!("{id}.txt")), text.join(" ")).unwrap();
    }
}
