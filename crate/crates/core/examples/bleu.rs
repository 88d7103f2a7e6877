//! Corpus BLEU for generated task descriptions.
//!
//! `cargo run --example bleu`

use ipa_eval::text::{bleu, BleuConfig, ReferenceSet, TextCandidate, ZeroPrecisionPolicy};

fn main() {
    let candidates = vec![
        TextCandidate::new("t1", "Open the mail client and click on the button 'New'."),
        TextCandidate::new("t2", "Type 42 into the cell A1 and save."),
    ];
    let references = vec![
        ReferenceSet::new("t1", &["Open the mail client. Click on the button 'New'."]).unwrap(),
        ReferenceSet::new("t2", &["Type 42 into cell A1.", "Enter 42 in A1 and save the sheet."]).unwrap(),
    ];
    println!("{}", bleu(&candidates, &references, &BleuConfig::default()).unwrap());

    let smoothed = BleuConfig::default().with_policy(ZeroPrecisionPolicy::EpsilonSmoothing);
    let one = [TextCandidate::new("0", "click the send button")];
    let refs = [ReferenceSet::new("0", &["click on the send button"]).unwrap()];
    println!("{}", bleu(&one, &refs, &smoothed).unwrap());
    println!("{}", bleu(&one, &refs, &BleuConfig::uniform(2)).unwrap());
}
