//! Parse a program, inspect it, and print its canonical form.
//!
//! `cargo run --example parse_and_serialize`

use ipa_eval::lang::{parse, serialize};

const SOURCE: &str = r#"
# send a short note
open("mail client")
click(@mail.new_message)
type( @mail.to , "bob@example.com" )
type(@mail.body, "see you at \"noon\"")
click_image(img("icons/send.png"))
"#;

fn main() {
    let process = parse(SOURCE).expect("valid program");
    for (i, stmt) in process.statements.iter().enumerate() {
        println!("{:>2}  {:<12} arity {}  key {}", i + 1, stmt.action(), stmt.arity(), stmt.canonical_key());
    }

    let canonical = serialize(&process);
    println!("\ncanonical form:\n{canonical}");
    assert_eq!(parse(&canonical).unwrap(), process);

    let broken = "open(\"mail\")\nclick(@mail.\ntype(@mail.to \"x\")\n";
    println!("diagnostics for a broken program:");
    for d in parse(broken).unwrap_err() {
        println!("  {d}");
    }
}
