//! Check a program against an environment and replay it.
//!
//! `cargo run --example validate_and_replay`

use ipa_eval::env::{replay, validate_process, ActionSignature, ArgKind, ElementDecl, Environment, Subject};
use ipa_eval::ir::BoundingBox;
use ipa_eval::lang::parse;

fn main() {
    let mut env = Environment::new();
    env.declare_vocabulary(["button", "text field"]).unwrap();
    let field = |x0, descriptor: &str| ElementDecl {
        bbox: Some(BoundingBox::new(x0, 10, x0 + 80, 30).unwrap()),
        descriptor: Some(descriptor.to_string()),
    };
    env.add_element("mail", "to", field(10, "text field")).unwrap();
    env.add_element("mail", "send", field(100, "button")).unwrap();
    env.add_action(ActionSignature::new("click", [ArgKind::Element])).unwrap();
    env.add_action(ActionSignature::new("type", [ArgKind::Element, ArgKind::Symbol])).unwrap();

    let mut good = parse("type(@mail.to, \"bob\")\nclick(@mail.send)").unwrap();
    env.realise(&mut good);
    if let ipa_eval::Argument::Element(e) = &good.statements[1].args[0] {
        println!("{e} realised at {:?}, typed as {:?}", e.bounding_box, env.type_of(Subject::Element(e)));
    }
    let trace = replay(&good, &env).expect("valid program");
    for step in &trace.steps {
        println!("{:<24} -> {}", step.statement.canonical_key(), &step.state.0[..16]);
    }

    let bad = parse("click(@mail.send, \"twice\")\ntype(@mail.cc, \"x\")\nscroll(@mail.to)").unwrap();
    println!("\nviolations:");
    for v in validate_process(&bad, &env).violations {
        println!("  {v}");
    }
    println!("\nenvironment file:\n{}", env.to_json());
}
