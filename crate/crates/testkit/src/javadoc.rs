//! Writes a JavaDoc-shaped HTML tree for a tiny sample project, the kind of
//! output `javadoc -d` produces: frame/index pages, one page per package and
//! class, plus the usual non-HTML assets.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

const PACKAGES: &[(&str, &[&str])] = &[
    ("com/example/geom", &["Point", "Rect", "Shapes", "Transform", "Bounds", "Polygon"]),
    ("com/example/io", &["Reader", "Writer", "Codec", "Buffer", "Channel"]),
    ("com/example/util", &["Strings", "Lists", "Maps", "Preconditions", "Stopwatch", "Cache", "Hashing"]),
];

const TOP_LEVEL: &[&str] = &[
    "index.html",
    "overview-summary.html",
    "overview-frame.html",
    "overview-tree.html",
    "allclasses-frame.html",
    "allclasses-noframe.html",
    "deprecated-list.html",
    "help-doc.html",
    "index-all.html",
    "constant-values.html",
    "serialized-form.html",
];

fn page(title: &str, body_links: &[String]) -> String {
    let mut s = String::new();
    s.push_str("<!DOCTYPE HTML PUBLIC \"-//W3C//DTD HTML 4.01 Transitional//EN\" \"http://www.w3.org/TR/html4/loose.dtd\">\n");
    s.push_str("<!-- NewPage -->\n<html lang=\"en\">\n<head>\n<!-- Generated by javadoc (1.8.0_292) on Tue Jun 01 10:00:00 UTC 2021 -->\n");
    s.push_str(&format!("<title>{title}</title>\n<meta name=\"date\" content=\"2021-06-01\">\n"));
    s.push_str("<link rel=\"stylesheet\" type=\"text/css\" href=\"stylesheet.css\" title=\"Style\">\n<script type=\"text/javascript\" src=\"script.js\"></script>\n</head>\n<body>\n");
    s.push_str("<div class=\"topNav\"><a name=\"navbar.top\">\n<!--   -->\n</a></div>\n<div class=\"contentContainer\">\n<ul class=\"blockList\">\n");
    for l in body_links {
        s.push_str(&format!("<li class=\"blockList\"><a href=\"{l}\">{l}</a></li>\n"));
    }
    s.push_str("</ul>\n</div>\n</body>\n</html>\n");
    s
}

/// Returns the HTML files written, sorted. `count` must be at least the number
/// of fixed pages (11 + 3 per package + classes); extra pages are class-use pages.
pub fn write_tree(root: &Path, count: usize) -> io::Result<Vec<PathBuf>> {
    let mut html: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let classes: Vec<String> =
        PACKAGES.iter().flat_map(|(p, cs)| cs.iter().map(move |c| format!("{p}/{c}.html"))).collect();
    for name in TOP_LEVEL {
        html.push((PathBuf::from(name), page(name, &classes).into_bytes()));
    }
    for (pkg, cs) in PACKAGES {
        for kind in ["package-summary", "package-frame", "package-tree"] {
            let links: Vec<String> = cs.iter().map(|c| format!("{c}.html")).collect();
            html.push((Path::new(pkg).join(format!("{kind}.html")), page(kind, &links).into_bytes()));
        }
        for c in cs.iter() {
            let members: Vec<String> = (0..12).map(|m| format!("#member{m}--")).collect();
            html.push((Path::new(pkg).join(format!("{c}.html")), page(c, &members).into_bytes()));
        }
    }
    let mut extra = 0;
    'outer: while html.len() < count {
        for (pkg, cs) in PACKAGES {
            for c in cs.iter() {
                if html.len() >= count {
                    break 'outer;
                }
                html.push((Path::new(pkg).join("class-use").join(format!("{c}.html")), page(c, &[]).into_bytes()));
                extra += 1;
            }
        }
        assert!(extra > 0);
    }
    assert!(html.len() == count, "tree needs at least {} pages", html.len());

    // the quirks real trees have
    if let Some((_, b)) = html.get_mut(1) {
        *b = String::from_utf8(b.clone()).unwrap().replace("</head>", "</HEAD>").into_bytes();
    }
    if let Some((_, b)) = html.get_mut(2) {
        *b = String::from_utf8(b.clone()).unwrap().replace('\n', "\r\n").into_bytes();
    }
    if let Some((_, b)) = html.get_mut(3) {
        // ISO-8859-1 copyright sign, not valid UTF-8
        let pos = b.windows(7).position(|w| w == b"</body>").unwrap();
        b.splice(pos..pos, b"\xa9 Example Corp".iter().copied());
    }
    if let Some((p, _)) = html.get_mut(4) {
        p.set_extension("htm");
    }

    let mut written = Vec::new();
    for (rel, bytes) in &html {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().unwrap())?;
        fs::write(&path, bytes)?;
        written.push(path);
    }
    fs::write(root.join("stylesheet.css"), "body { background-color: #ffffff; }\n/* </head> */\n")?;
    fs::write(root.join("script.js"), "function show(type) { return type; }\n")?;
    fs::write(root.join("package-list"), "com.example.geom\ncom.example.io\ncom.example.util\n")?;
    fs::create_dir_all(root.join("resources"))?;
    fs::write(root.join("resources/inherit.gif"), b"GIF89a\x01\x00\x01\x00\x80\x00\x00\xff\xff\xff\x00\x00\x00!\xf9")?;
    written.sort();
    Ok(written)
}

/// Every file under `root` with its bytes, by relative path.
pub fn snapshot(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
