//! Strict error, sensitive error and maximum program overlap for a small
//! corpus of generated programs.
//!
//! `cargo run --example program_metrics`

use ipa_eval::lang::parse;
use ipa_eval::metrics::{evaluate_corpora, mae_strict, mpo_corpus, MpoMode, SensitiveErrorConfig};
use ipa_eval::ProgramCorpus;

fn corpus(items: &[(&str, &str)]) -> ProgramCorpus {
    ProgramCorpus::new(items.iter().map(|(id, src)| parse(src).unwrap().with_id(*id)).collect()).unwrap()
}

fn main() {
    let gold = corpus(&[
        ("t1", "open(\"mail\")\nclick(@mail.new)\ntype(@mail.to, \"bob\")\nclick(@mail.send)"),
        ("t2", "open(\"sheet\")\ntype(@sheet.a1, \"42\")\nhotkey(\"ctrl s\")"),
        ("t3", "open(\"browser\")\ntype(@browser.address_bar, \"example.org\")"),
    ]);
    let generated = corpus(&[
        ("t1", "open(\"mail\")\nclick(@mail.new)\ntype(@mail.to, \"bob\")\nclick(@mail.send)"),
        ("t2", "open(\"sheet\")\ntype(@sheet.a2, \"42\")\nhotkey(\"ctrl s\")\nhotkey(\"ctrl q\")"),
        ("t3", "open(\"browser\")"),
    ]);

    let cfg = SensitiveErrorConfig::default();
    println!("{:<4} {:>6} {:>9} {:>6}", "id", "strict", "sensitive", "mpo");
    for (id, r) in evaluate_corpora(&generated, &gold, &cfg, MpoMode::Literal).unwrap() {
        println!("{id:<4} {:>6} {:>9.3} {:>6.3}", r.strict, r.sensitive, r.mpo);
    }
    println!("\nMAE_strict          {:.3}", mae_strict(&generated, &gold).unwrap());
    println!("MPO literal         {:.3}", mpo_corpus(&generated, &gold, MpoMode::Literal).unwrap());
    println!("MPO gold-normalized {:.3}", mpo_corpus(&generated, &gold, MpoMode::GoldNormalized).unwrap());
}
