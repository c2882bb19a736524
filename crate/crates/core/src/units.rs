//! Source files and the method/class/file-level units extracted from them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tree_sitter::Node;

use crate::error::{Error, Result};
use crate::syntax::{parse, Language, ParseTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub path: String,
    pub language: Language,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, language: Language, text: impl Into<String>) -> Self {
        SourceFile {
            path: path.into(),
            language,
            text: text.into(),
            metadata: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Method,
    Class,
    File,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Method => "method",
            Granularity::Class => "class",
            Granularity::File => "file",
        })
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "method" => Ok(Granularity::Method),
            "class" => Ok(Granularity::Class),
            "file" => Ok(Granularity::File),
            other => Err(Error::Precondition(format!("unknown granularity `{other}`"))),
        }
    }
}

/// One snippet of code taken from a [`SourceFile`].
///
/// `text` is the unit's lines with the common indentation of its first line
/// removed (`indent`), so a method taken from a class body parses and runs on
/// its own. Re-indenting `text` by `indent` gives back the file lines at
/// `line_span`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeUnit {
    pub id: String,
    pub language: Language,
    pub granularity: Granularity,
    pub name: String,
    pub text: String,
    pub line_span: (usize, usize),
    pub loc: usize,
    #[serde(default)]
    pub indent: String,
    #[serde(default)]
    pub path: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    /// Class units only: superclass definitions found in the same file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub superclasses: Vec<CodeUnit>,
}

impl CodeUnit {
    /// A free-standing unit that did not come from a file.
    pub fn from_text(
        id: impl Into<String>,
        language: Language,
        granularity: Granularity,
        text: impl Into<String>,
    ) -> Self {
        let text = text.into();
        let lines = text.lines().count().max(1);
        CodeUnit {
            id: id.into(),
            language,
            granularity,
            name: String::new(),
            loc: count_loc(&text),
            text,
            line_span: (1, lines),
            indent: String::new(),
            path: String::new(),
            metadata: BTreeMap::new(),
            superclasses: Vec::new(),
        }
    }

    pub fn with_text(&self, text: String) -> Self {
        CodeUnit {
            loc: count_loc(&text),
            text,
            ..self.clone()
        }
    }
}

/// Non-empty lines after stripping trailing whitespace.
pub fn count_loc(text: &str) -> usize {
    text.lines().filter(|l| !l.trim_end().is_empty()).count()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExtractOptions {
    /// Also emit functions defined inside other functions.
    pub nested_functions: bool,
}

pub fn extract_units(file: &SourceFile, granularity: Granularity) -> Result<Vec<CodeUnit>> {
    extract_units_with(file, granularity, ExtractOptions::default())
}

pub fn extract_units_with(
    file: &SourceFile,
    granularity: Granularity,
    options: ExtractOptions,
) -> Result<Vec<CodeUnit>> {
    let tree = parse(&file.text, file.language)?;
    if granularity == Granularity::File {
        if file.text.trim().is_empty() {
            return Ok(Vec::new());
        }
        let mut unit = CodeUnit::from_text(
            format!("{}::<file>", file.path),
            file.language,
            Granularity::File,
            file.text.clone(),
        );
        unit.path = file.path.clone();
        unit.metadata = file.metadata.clone();
        return Ok(vec![unit]);
    }

    let mut found = Vec::new();
    collect_definitions(&tree, tree.root(), granularity, options, false, &mut found);

    let mut units: Vec<CodeUnit> = found
        .into_iter()
        .map(|(node, name)| make_unit(file, &tree, node, name, granularity))
        .collect();

    if granularity == Granularity::Class {
        let pool = units.clone();
        for unit in &mut units {
            unit.superclasses = resolve_superclasses(unit, &pool);
        }
    }
    Ok(units)
}

fn definition_name<'t>(tree: &'t ParseTree, node: Node<'_>) -> &'t str {
    node.child_by_field_name("name")
        .map(|n| tree.text(n))
        .unwrap_or("")
}

fn collect_definitions<'t>(
    tree: &'t ParseTree,
    node: Node<'t>,
    granularity: Granularity,
    options: ExtractOptions,
    inside_function: bool,
    out: &mut Vec<(Node<'t>, String)>,
) {
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        let (def, span) = match child.kind() {
            "decorated_definition" => match child.child_by_field_name("definition") {
                Some(inner) => (inner, child),
                None => continue,
            },
            _ => (child, child),
        };
        let kind = def.kind();
        let is_function = matches!(
            kind,
            "function_definition" | "method_declaration" | "constructor_declaration"
        );
        let is_class = matches!(
            kind,
            "class_definition" | "class_declaration" | "enum_declaration" | "interface_declaration"
        );

        if is_function {
            let wanted = granularity == Granularity::Method
                && (!inside_function || options.nested_functions);
            if wanted {
                out.push((span, definition_name(tree, def).to_string()));
            }
            if options.nested_functions {
                if let Some(body) = def.child_by_field_name("body") {
                    collect_definitions(tree, body, granularity, options, true, out);
                }
            }
        } else if is_class {
            if inside_function {
                continue;
            }
            if granularity == Granularity::Class && kind != "interface_declaration" {
                out.push((span, definition_name(tree, def).to_string()));
            }
            if let Some(body) = def.child_by_field_name("body") {
                collect_definitions(tree, body, granularity, options, false, out);
            }
        } else if !inside_function && is_compound_statement(kind) {
            // Definitions guarded by if/try/with at module level.
            collect_definitions(tree, child, granularity, options, inside_function, out);
        }
    }
}

fn is_compound_statement(kind: &str) -> bool {
    matches!(
        kind,
        "if_statement"
            | "else_clause"
            | "elif_clause"
            | "try_statement"
            | "except_clause"
            | "finally_clause"
            | "with_statement"
            | "block"
    )
}

fn make_unit(
    file: &SourceFile,
    tree: &ParseTree,
    node: Node<'_>,
    name: String,
    granularity: Granularity,
) -> CodeUnit {
    let src = tree.source();
    let line_start = src[..node.start_byte()].rfind('\n').map_or(0, |i| i + 1);
    let prefix = &src[line_start..node.start_byte()];
    let indent: String = if prefix.chars().all(|c| c == ' ' || c == '\t') {
        prefix.to_string()
    } else {
        String::new()
    };
    let start = if indent.is_empty() && !prefix.is_empty() {
        node.start_byte()
    } else {
        line_start
    };
    let mut text = dedent(&src[start..node.end_byte()], &indent);
    text.push('\n');
    let line_span = (node.start_position().row + 1, node.end_position().row + 1);
    CodeUnit {
        id: format!("{}::{}@{}", file.path, name, line_span.0),
        language: file.language,
        granularity,
        name,
        loc: count_loc(&text),
        text,
        line_span,
        indent,
        path: file.path.clone(),
        metadata: file.metadata.clone(),
        superclasses: Vec::new(),
    }
}

/// Removes `prefix` from every line that starts with it.
pub fn dedent(text: &str, prefix: &str) -> String {
    if prefix.is_empty() {
        return text.to_string();
    }
    text.split_inclusive('\n')
        .map(|line| line.strip_prefix(prefix).unwrap_or(line))
        .collect()
}

/// Prepends `prefix` to every line holding non-whitespace text.
pub fn indent_lines(text: &str, prefix: &str) -> String {
    if prefix.is_empty() {
        return text.to_string();
    }
    text.split_inclusive('\n')
        .map(|line| {
            if line.trim().is_empty() {
                line.to_string()
            } else {
                format!("{prefix}{line}")
            }
        })
        .collect()
}

/// Names of the base classes listed in a class unit's header.
pub fn superclass_names(unit: &CodeUnit) -> Vec<String> {
    let Ok(tree) = parse(&unit.text, unit.language) else {
        return Vec::new();
    };
    let Some(class) = first_class(tree.root()) else {
        return Vec::new();
    };
    let mut names = Vec::new();
    match unit.language {
        Language::Python => {
            if let Some(args) = class.child_by_field_name("superclasses") {
                let mut cursor = args.walk();
                for arg in args.named_children(&mut cursor) {
                    let name = match arg.kind() {
                        "identifier" => tree.text(arg),
                        "attribute" => arg
                            .child_by_field_name("attribute")
                            .map_or("", |a| tree.text(a)),
                        _ => continue,
                    };
                    if name != "object" {
                        names.push(name.to_string());
                    }
                }
            }
        }
        Language::Java => {
            if let Some(sup) = class.child_by_field_name("superclass") {
                let mut cursor = sup.walk();
                for t in sup.named_children(&mut cursor) {
                    names.push(tree.text(t).to_string());
                }
            }
        }
    }
    names
}

pub(crate) fn first_class(root: Node<'_>) -> Option<Node<'_>> {
    let mut cursor = root.walk();
    let found = root.named_children(&mut cursor).find_map(|n| match n.kind() {
        "class_definition" | "class_declaration" => Some(n),
        "decorated_definition" => n
            .child_by_field_name("definition")
            .filter(|d| d.kind() == "class_definition"),
        _ => None,
    });
    found
}

fn resolve_superclasses(unit: &CodeUnit, pool: &[CodeUnit]) -> Vec<CodeUnit> {
    let mut resolved: Vec<CodeUnit> = Vec::new();
    let mut queue = superclass_names(unit);
    while let Some(name) = queue.first().cloned() {
        queue.remove(0);
        if resolved.iter().any(|u| u.name == name) || name == unit.name {
            continue;
        }
        if let Some(found) = pool.iter().find(|u| u.name == name) {
            let mut copy = found.clone();
            copy.superclasses.clear();
            queue.extend(superclass_names(&copy));
            resolved.push(copy);
        }
    }
    resolved
}
