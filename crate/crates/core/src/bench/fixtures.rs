//! Seeded synthetic benchmark sets with the same shape as the real one: ten
//! categories, a gold program per task, one described segment per statement.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::manifest::{
    ManifestFile, ManifestTask, Step, VideoMeta, ENV_FILE, GOLD_FILE, MANIFEST_FILE, STEPS_FILE, SUMMARY_FILE,
    TASKS_DIR, VIDEO_FILE,
};
use super::{BenchError, Category};
use crate::env::{ActionSignature, ArgKind, ElementDecl, Environment};
use crate::ir::{Argument, BoundingBox, Process, Statement};
use crate::lang;

const MIN_STATEMENTS: usize = 3;
const MAX_STATEMENTS: usize = 12;
const ICON_SIZE: u32 = 16;

struct Element {
    id: &'static str,
    label: &'static str,
    descriptor: &'static str,
}

struct App {
    interface: &'static str,
    name: &'static str,
    elements: &'static [Element],
    inputs: &'static [&'static str],
    icons: &'static [&'static str],
}

macro_rules! el {
    ($id:literal, $label:literal, $descriptor:literal) => {
        Element {
            id: $id,
            label: $label,
            descriptor: $descriptor,
        }
    };
}

const SHEET: App = App {
    interface: "sheet",
    name: "spreadsheet",
    elements: &[
        el!("file_menu", "File", "menu"),
        el!("save_item", "Save", "menu item"),
        el!("cell_a1", "A1", "cell"),
        el!("cell_b2", "B2", "cell"),
        el!("cell_c3", "C3", "cell"),
        el!("formula_bar", "Formula", "text field"),
        el!("new_column", "Insert column", "button"),
    ],
    inputs: &["mean of marks", "student name", "lowest price", "carrot", "flour", "total"],
    icons: &["sum_icon", "chart_icon"],
};

const BROWSER: App = App {
    interface: "browser",
    name: "browser",
    elements: &[
        el!("address_bar", "Address", "text field"),
        el!("search_box", "Search", "text field"),
        el!("search_button", "Go", "button"),
        el!("first_result", "First result", "link"),
        el!("back_button", "Back", "button"),
        el!("page_body", "Page", "panel"),
    ],
    inputs: &["vegan carrot cake", "flight to tokyo", "cheapest price", "top movies", "recipe ingredients"],
    icons: &["reload_icon", "bookmark_icon"],
};

const MAIL: App = App {
    interface: "mail",
    name: "webmail",
    elements: &[
        el!("new_message", "New message", "button"),
        el!("to_field", "To", "text field"),
        el!("subject_field", "Subject", "text field"),
        el!("body_field", "Message", "text field"),
        el!("send_button", "Send", "button"),
        el!("inbox_first", "First email", "list item"),
    ],
    inputs: &["alice", "bob", "flight booking request", "manchester to tokyo", "thank you"],
    icons: &["attach_icon", "reply_icon"],
};

const SOCIAL: App = App {
    interface: "social",
    name: "social media site",
    elements: &[
        el!("search_box", "Search", "text field"),
        el!("trending_list", "Trending", "list"),
        el!("first_post", "First post", "list item"),
        el!("profile_link", "Profile", "link"),
    ],
    inputs: &["trailer", "top hashtags", "new releases"],
    icons: &["like_icon", "share_icon"],
};

const APPS: [&App; 4] = [&SHEET, &BROWSER, &MAIL, &SOCIAL];

fn apps_for(category: Category, rng: &mut ChaCha8Rng) -> Vec<&'static App> {
    match category {
        Category::Spreadsheet => vec![&SHEET],
        Category::SpreadsheetBrowserSimple | Category::SpreadsheetBrowserElaborate => vec![&SHEET, &BROWSER],
        Category::Webmail => vec![&MAIL],
        Category::SpreadsheetWebmail => vec![&SHEET, &MAIL],
        Category::WebmailBrowser => vec![&MAIL, &BROWSER],
        Category::BrowserSpreadsheetWebmail => vec![&BROWSER, &SHEET, &MAIL],
        Category::BrowserSocial => vec![&BROWSER, &SOCIAL],
        Category::BrowserSocialSpreadsheet => vec![&BROWSER, &SOCIAL, &SHEET],
        Category::DifferentOs => {
            let others = &Category::ALL[..Category::ALL.len() - 1];
            apps_for(*others.choose(rng).expect("non-empty"), rng)
        }
    }
}

fn summary_for(category: Category, apps: &[&App], value: &str) -> String {
    let names: Vec<&str> = apps.iter().map(|a| a.name).collect();
    let using = match names.as_slice() {
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
        [] => unreachable!(),
    };
    let os = if category == Category::DifferentOs {
        " on Ubuntu"
    } else {
        ""
    };
    format!("Use the {using}{os} to work with \"{value}\".")
}

/// The environment every generated task is defined over.
pub fn bundled_environment() -> Environment {
    let mut env = Environment::new();
    for (a, app) in APPS.iter().enumerate() {
        for (e, el) in app.elements.iter().enumerate() {
            let (x0, y0) = (40 + 120 * e as u32, 30 + 200 * a as u32);
            let decl = ElementDecl {
                bbox: Some(BoundingBox::new(x0, y0, x0 + 100, y0 + 24).expect("ordered corners")),
                descriptor: Some(el.descriptor.to_string()),
            };
            env.add_element(app.interface, el.id, decl).expect("unique fixture elements");
        }
    }
    let actions = [
        ("open", vec![ArgKind::Symbol]),
        ("click", vec![ArgKind::Element]),
        ("double_click", vec![ArgKind::Element]),
        ("type", vec![ArgKind::Element, ArgKind::Symbol]),
        ("hotkey", vec![ArgKind::Symbol]),
        ("scroll", vec![ArgKind::Element, ArgKind::Symbol]),
        ("click_image", vec![ArgKind::Image]),
        ("wait", vec![ArgKind::Any]),
    ];
    for (name, kinds) in actions {
        env.add_action(ActionSignature::new(name, kinds)).expect("unique fixture actions");
    }
    env
}

fn icon_path(name: &str) -> String {
    format!("images/{name}.png")
}

fn element_arg(app: &App, el: &Element) -> Argument {
    Argument::element(app.interface, el.id).expect("fixture identifiers")
}

/// One random statement with its imperative description.
fn random_statement(rng: &mut ChaCha8Rng, app: &App) -> (Statement, String) {
    let el = app.elements.choose(rng).expect("apps have elements");
    let (action, args, sentence) = match rng.gen_range(0..10) {
        0..=3 => (
            "click",
            vec![element_arg(app, el)],
            format!("Click on the {} '{}'.", el.descriptor, el.label),
        ),
        4 => (
            "double_click",
            vec![element_arg(app, el)],
            format!("Double-click on the {} '{}'.", el.descriptor, el.label),
        ),
        5 | 6 => {
            let value = *app.inputs.choose(rng).expect("apps have inputs");
            (
                "type",
                vec![element_arg(app, el), Argument::symbol(value)],
                format!("Type '{value}' into the {} '{}'.", el.descriptor, el.label),
            )
        }
        7 => {
            let times = rng.gen_range(1..=5);
            (
                "scroll",
                vec![element_arg(app, el), Argument::symbol(times.to_string())],
                format!("Scroll down {times} times in the {} '{}'.", el.descriptor, el.label),
            )
        }
        8 => {
            let icon = *app.icons.choose(rng).expect("apps have icons");
            (
                "click_image",
                vec![Argument::image(icon_path(icon))],
                format!("Click on the icon '{}'.", icon.trim_end_matches("_icon")),
            )
        }
        _ => {
            let keys = *["ctrl c", "ctrl v", "ctrl s", "enter"].choose(rng).expect("non-empty");
            ("hotkey", vec![Argument::symbol(keys)], format!("Press {keys}."))
        }
    };
    (Statement::new(action, args).expect("fixture action names"), sentence)
}

fn open_statement(app: &App) -> (Statement, String) {
    (
        Statement::new("open", vec![Argument::symbol(app.name)]).expect("fixture action names"),
        format!("Open the {}.", app.name),
    )
}

struct GeneratedTask {
    process: Process,
    steps: Vec<Step>,
    summary: String,
    icons: Vec<&'static str>,
}

fn generate_task(rng: &mut ChaCha8Rng, category: Category) -> GeneratedTask {
    let apps = apps_for(category, rng);
    let n = rng.gen_range(MIN_STATEMENTS..=MAX_STATEMENTS);

    let mut pairs = vec![open_statement(apps[0])];
    let mut current = apps[0];
    while pairs.len() < n {
        let next = *apps.choose(rng).expect("non-empty");
        if !std::ptr::eq(next, current) && pairs.len() + 1 < n {
            pairs.push(open_statement(next));
            current = next;
            continue;
        }
        pairs.push(random_statement(rng, current));
    }

    // Segment times in tenths of a second keep the JSON exact.
    let mut t = rng.gen_range(0..20u32);
    let mut steps = Vec::with_capacity(n);
    for (_, sentence) in &pairs {
        let len = rng.gen_range(20..80u32);
        steps.push(Step {
            start: f64::from(t) / 10.0,
            end: f64::from(t + len) / 10.0,
            sentence: sentence.clone(),
        });
        t += len + rng.gen_range(0..10u32);
    }

    let mut icons: Vec<&'static str> = pairs
        .iter()
        .flat_map(|(s, _)| s.args.iter())
        .filter_map(|a| match a {
            Argument::Image(img) => APPS
                .iter()
                .flat_map(|app| app.icons.iter())
                .find(|icon| icon_path(icon) == img.path())
                .copied(),
            _ => None,
        })
        .collect();
    icons.sort_unstable();
    icons.dedup();

    let value = *apps[0].inputs.choose(rng).expect("apps have inputs");
    GeneratedTask {
        process: Process::new(pairs.into_iter().map(|(s, _)| s).collect()),
        summary: summary_for(category, &apps, value),
        steps,
        icons,
    }
}

/// Deterministic 16x16 grayscale icon derived from its name.
fn icon_png(name: &str) -> Vec<u8> {
    let seed = name.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: u8 = rng.gen_range(0..128);
    let img = ImageBuffer::from_fn(ICON_SIZE, ICON_SIZE, |x, y| {
        let ring = (x as i32 - 8).abs().max((y as i32 - 8).abs()) as u8;
        Luma([base.wrapping_add(ring * 14).wrapping_add(rng.gen_range(0..8))])
    });
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("in-memory PNG encoding");
    out.into_inner()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSummary {
    pub name: String,
    pub task_ids: Vec<String>,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), BenchError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| BenchError::io(path, e))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("fixture data serializes");
    s.push('\n');
    s
}

/// Write a loadable benchmark of `10 * tasks_per_category` synthetic tasks to
/// `dest`. The same seed always produces byte-identical files.
pub fn generate_fixtures(seed: u64, tasks_per_category: usize, dest: impl AsRef<Path>) -> Result<FixtureSummary, BenchError> {
    if tasks_per_category == 0 {
        return Err(BenchError::Config("tasks_per_category must be at least 1".into()));
    }
    let dest = dest.as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env_json = bundled_environment().to_json();
    let width = tasks_per_category.to_string().len().max(2);

    let mut manifest_tasks = Vec::with_capacity(10 * tasks_per_category);
    for category in Category::ALL {
        for i in 1..=tasks_per_category {
            let task_id = format!("{category}-{i:0width$}");
            let task = generate_task(&mut rng, category);
            let dir = dest.join(TASKS_DIR).join(&task_id);

            write(&dir.join(SUMMARY_FILE), format!("{}\n", task.summary))?;
            write(&dir.join(STEPS_FILE), to_json(&task.steps))?;
            write(&dir.join(GOLD_FILE), lang::serialize(&task.process))?;
            write(&dir.join(ENV_FILE), &env_json)?;
            let duration_s = task.steps.last().map_or(0.0, |s| s.end + 1.0);
            write(
                &dir.join(VIDEO_FILE),
                to_json(&VideoMeta {
                    path: "video.mp4".into(),
                    duration_s,
                }),
            )?;
            for icon in &task.icons {
                write(&dir.join(icon_path(icon)), icon_png(icon))?;
            }

            let os_label = if category == Category::DifferentOs {
                "ubuntu 16.04"
            } else {
                "windows 10"
            };
            manifest_tasks.push(ManifestTask {
                task_id,
                category: category.to_string(),
                os_label: Some(os_label.into()),
            });
        }
    }

    let name = format!("synthetic-seed{seed}");
    let task_ids = manifest_tasks.iter().map(|t| t.task_id.clone()).collect();
    write(
        &dest.join(MANIFEST_FILE),
        to_json(&ManifestFile {
            name: name.clone(),
            tasks: manifest_tasks,
        }),
    )?;
    Ok(FixtureSummary { name, task_ids })
}
