//! Parsing and lossless rendering of Python and Java source.
//!
//! A [`ParseTree`] owns its source text next to the tree-sitter tree, so every
//! node maps back to a byte range and `render` is the identity on unmodified
//! trees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tree_sitter::{Node, Parser, Point, Tree};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Language {
    Python,
    Java,
}

impl Language {
    fn grammar(self) -> tree_sitter::Language {
        match self {
            Language::Python => tree_sitter_python::LANGUAGE.into(),
            Language::Java => tree_sitter_java::LANGUAGE.into(),
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext {
            "py" => Some(Language::Python),
            "java" => Some(Language::Java),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::Python => "python",
            Language::Java => "java",
        }
    }

    /// Keywords plus builtin names that must never be introduced or renamed.
    pub fn is_reserved(self, name: &str) -> bool {
        match self {
            Language::Python => PY_KEYWORDS.contains(&name) || PY_BUILTINS.contains(&name),
            Language::Java => JAVA_KEYWORDS.contains(&name) || JAVA_LANG_NAMES.contains(&name),
        }
    }

    pub fn is_keyword(self, name: &str) -> bool {
        match self {
            Language::Python => PY_KEYWORDS.contains(&name),
            Language::Java => JAVA_KEYWORDS.contains(&name),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "python" | "py" => Ok(Language::Python),
            "java" => Ok(Language::Java),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }
}

/// A parsed source text. Immutable once built.
pub struct ParseTree {
    language: Language,
    source: String,
    tree: Tree,
}

impl fmt::Debug for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParseTree")
            .field("language", &self.language)
            .field("bytes", &self.source.len())
            .field("valid", &self.is_valid())
            .finish()
    }
}

impl ParseTree {
    /// Parses without rejecting syntax errors. Use [`parse`] for the checked variant.
    pub fn parse_lenient(text: &str, language: Language) -> Self {
        let mut parser = Parser::new();
        parser
            .set_language(&language.grammar())
            .expect("bundled grammar is ABI compatible");
        let tree = parser
            .parse(text, None)
            .expect("parser has a language and no cancellation flag");
        ParseTree {
            language,
            source: text.to_string(),
            tree,
        }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn is_valid(&self) -> bool {
        !self.tree.root_node().has_error()
    }

    pub fn text(&self, node: Node<'_>) -> &str {
        &self.source[node.byte_range()]
    }

    /// First error or missing node, as a 1-based position.
    pub fn first_error(&self) -> Option<(usize, usize)> {
        fn find(node: Node<'_>) -> Option<Point> {
            if node.is_error() || node.is_missing() {
                return Some(node.start_position());
            }
            if !node.has_error() {
                return None;
            }
            let mut cursor = node.walk();
            let found = node.children(&mut cursor).find_map(find);
            found
        }
        find(self.root()).map(|p| (p.row + 1, p.column + 1))
    }

    /// Depth-first pre-order list of every named node.
    pub fn named_nodes(&self) -> Vec<Node<'_>> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(node) = stack.pop() {
            if node.is_named() {
                out.push(node);
            }
            let mut cursor = node.walk();
            let children: Vec<_> = node.children(&mut cursor).collect();
            stack.extend(children.into_iter().rev());
        }
        out
    }

    pub fn count_kind(&self, kind: &str) -> usize {
        self.named_nodes().iter().filter(|n| n.kind() == kind).count()
    }
}

/// Parses `text`, rejecting input the grammar does not accept.
pub fn parse(text: &str, language: Language) -> Result<ParseTree> {
    let tree = ParseTree::parse_lenient(text, language);
    match tree.first_error() {
        None => Ok(tree),
        Some((line, column)) => Err(Error::Syntax {
            language,
            line,
            column,
        }),
    }
}

pub fn render(tree: &ParseTree) -> String {
    tree.source.clone()
}

pub fn reparses(text: &str, language: Language) -> bool {
    ParseTree::parse_lenient(text, language).is_valid()
}

const PY_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield", "match", "case",
];

const PY_BUILTINS: &[&str] = &[
    "abs", "aiter", "all", "anext", "any", "ascii", "bin", "bool", "breakpoint", "bytearray",
    "bytes", "callable", "chr", "classmethod", "compile", "complex", "copyright", "credits",
    "delattr", "dict", "dir", "divmod", "enumerate", "eval", "exit", "filter", "float",
    "format", "frozenset", "getattr", "globals", "hasattr", "hash", "help", "hex", "id",
    "input", "int", "isinstance", "issubclass", "iter", "len", "license", "list", "locals",
    "map", "max", "memoryview", "min", "next", "object", "oct", "open", "ord", "pow",
    "property", "quit", "range", "repr", "reversed", "round", "set", "setattr", "slice",
    "print", "exec", "sorted", "staticmethod", "str", "sum", "super", "tuple", "type", "vars", "zip",
    "self", "cls", "__name__", "__file__", "__doc__", "__class__", "__builtins__",
    "Exception", "BaseException", "ArithmeticError", "AssertionError", "AttributeError",
    "EOFError", "ImportError", "IndexError", "KeyError", "KeyboardInterrupt", "LookupError",
    "MemoryError", "NameError", "NotImplementedError", "NotImplemented", "OSError",
    "OverflowError", "RecursionError", "RuntimeError", "StopIteration", "SyntaxError",
    "SystemExit", "TypeError", "UnicodeError", "ValueError", "ZeroDivisionError",
    "Ellipsis", "IOError", "FileNotFoundError", "PermissionError", "TimeoutError",
    "Warning", "DeprecationWarning", "UserWarning",
];

const JAVA_KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class",
    "const", "continue", "default", "do", "double", "else", "enum", "extends", "final",
    "finally", "float", "for", "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "package", "private", "protected", "public",
    "return", "short", "static", "strictfp", "super", "switch", "synchronized", "this",
    "throw", "throws", "transient", "try", "void", "volatile", "while", "true", "false",
    "null", "var", "record", "yield", "sealed", "permits", "non-sealed",
];

const JAVA_LANG_NAMES: &[&str] = &[
    "String", "Object", "Integer", "Long", "Double", "Float", "Boolean", "Character", "Byte",
    "Short", "Math", "System", "Thread", "Runnable", "Exception", "RuntimeException",
    "Error", "Throwable", "StringBuilder", "Iterable", "Comparable", "Class", "Void",
    "Number", "Override", "Deprecated", "length",
];
