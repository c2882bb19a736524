//! Scope-aware identifier resolution.
//!
//! Every identifier occurrence in a tree is resolved to the binding it refers
//! to. Python follows the usual local/enclosing/global/builtin lookup with
//! class bodies skipped for nested scopes. Java resolves block-scoped locals
//! and parameters; anything else (fields, types, methods) is treated as free.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::Range;

use serde::Serialize;
use tree_sitter::Node;

use crate::syntax::{Language, ParseTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BindingKind {
    Variable,
    Parameter,
    FunctionName,
    ClassName,
    Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScopeKind {
    Module,
    Class,
    Function,
    Lambda,
    Comprehension,
    Block,
    /// Not bound anywhere in the tree: globals, builtins, fields, attributes.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentifierBinding {
    pub name: String,
    pub kind: BindingKind,
    pub scope: usize,
    pub scope_kind: ScopeKind,
    pub occurrences: Vec<Range<usize>>,
    pub is_reserved: bool,
    /// A local that can be renamed without changing behavior.
    pub renameable: bool,
    /// Parameter with a default value or keyword-only position; callers may
    /// pass it by name.
    pub keyword_passable: bool,
}

impl IdentifierBinding {
    pub fn is_local(&self) -> bool {
        matches!(
            self.scope_kind,
            ScopeKind::Function | ScopeKind::Lambda | ScopeKind::Comprehension | ScopeKind::Block
        )
    }
}

const EXTERNAL_SCOPE: usize = usize::MAX;

pub fn collect_identifiers(tree: &ParseTree) -> Vec<IdentifierBinding> {
    let mut bindings = match tree.language() {
        Language::Python => python::collect(tree),
        Language::Java => java::collect(tree),
    };
    for b in &mut bindings {
        b.occurrences.sort_by_key(|r| r.start);
        b.occurrences.dedup();
    }
    bindings.sort_by_key(|b| (b.occurrences.first().map_or(0, |r| r.start), b.name.clone()));
    bindings
}

/// Every identifier-like token text in the tree; used for collision checks.
pub fn all_names(tree: &ParseTree) -> HashSet<String> {
    tree.named_nodes()
        .into_iter()
        .filter(|n| {
            matches!(
                n.kind(),
                "identifier" | "type_identifier" | "field_identifier" | "property_identifier"
            )
        })
        .map(|n| tree.text(n).to_string())
        .collect()
}

fn same(a: Node<'_>, b: Node<'_>) -> bool {
    a.id() == b.id()
}

fn field_is(parent: Node<'_>, field: &str, child: Node<'_>) -> bool {
    parent
        .child_by_field_name(field)
        .is_some_and(|f| same(f, child))
}

#[derive(Default)]
struct Grouper {
    groups: HashMap<(usize, String), IdentifierBinding>,
}

impl Grouper {
    fn add(
        &mut self,
        scope: usize,
        scope_kind: ScopeKind,
        name: &str,
        kind: BindingKind,
        range: Range<usize>,
    ) -> &mut IdentifierBinding {
        let entry = self
            .groups
            .entry((scope, name.to_string()))
            .or_insert_with(|| IdentifierBinding {
                name: name.to_string(),
                kind,
                scope,
                scope_kind,
                occurrences: Vec::new(),
                is_reserved: false,
                renameable: false,
                keyword_passable: false,
            });
        entry.occurrences.push(range);
        entry
    }
}

mod python {
    use super::*;

    #[derive(Debug)]
    struct Scope {
        kind: ScopeKind,
        parent: Option<usize>,
        bound: HashMap<String, BindingKind>,
        imported: HashSet<String>,
        keyword_passable: HashSet<String>,
        globals: HashSet<String>,
        nonlocals: HashSet<String>,
    }

    const COMPREHENSIONS: &[&str] = &[
        "list_comprehension",
        "set_comprehension",
        "dictionary_comprehension",
        "generator_expression",
    ];

    fn scope_kind_of(node: Node<'_>) -> Option<ScopeKind> {
        match node.kind() {
            "module" => Some(ScopeKind::Module),
            "function_definition" => Some(ScopeKind::Function),
            "lambda" => Some(ScopeKind::Lambda),
            "class_definition" => Some(ScopeKind::Class),
            k if COMPREHENSIONS.contains(&k) => Some(ScopeKind::Comprehension),
            _ => None,
        }
    }

    /// True when `node` names a parameter (as opposed to its default or annotation).
    fn is_param_name(node: Node<'_>) -> bool {
        if node.kind() != "identifier" {
            return false;
        }
        let Some(p) = node.parent() else { return false };
        match p.kind() {
            "parameters" | "lambda_parameters" => true,
            "default_parameter" | "typed_default_parameter" => field_is(p, "name", node),
            "typed_parameter" => p.named_child(0).is_some_and(|c| same(c, node)),
            "list_splat_pattern" | "dictionary_splat_pattern" => p.parent().is_some_and(|g| {
                matches!(g.kind(), "parameters" | "lambda_parameters" | "typed_parameter")
            }),
            _ => false,
        }
    }

    /// The scope-introducing node an occurrence belongs to.
    fn scope_node(node: Node<'_>) -> Node<'_> {
        let mut chain = vec![node];
        let mut cur = node;
        while let Some(p) = cur.parent() {
            chain.push(p);
            cur = p;
        }
        for i in 1..chain.len() {
            let a = chain[i];
            let c = chain[i - 1];
            match a.kind() {
                "function_definition" | "lambda" => {
                    if field_is(a, "body", c) {
                        return a;
                    }
                    if field_is(a, "parameters", c) && is_param_name(node) {
                        return a;
                    }
                }
                "class_definition" => {
                    if field_is(a, "body", c) {
                        return a;
                    }
                }
                k if COMPREHENSIONS.contains(&k) => {
                    let first_clause = {
                        let mut cursor = a.walk();
                        let found = a
                            .named_children(&mut cursor)
                            .find(|n| n.kind() == "for_in_clause");
                        found
                    };
                    let in_first_iterable = i >= 2
                        && first_clause.is_some_and(|f| same(f, c))
                        && field_is(c, "right", chain[i - 2]);
                    if !in_first_iterable {
                        return a;
                    }
                }
                "module" => return a,
                _ => {}
            }
        }
        *chain.last().unwrap()
    }

    enum Role {
        Load,
        Store(BindingKind),
        Param,
        Import,
        Global,
        Nonlocal,
        Skip,
        Attribute,
    }

    fn role(node: Node<'_>) -> Role {
        let Some(p) = node.parent() else {
            return Role::Load;
        };
        match p.kind() {
            "attribute" if field_is(p, "attribute", node) => return Role::Attribute,
            "keyword_argument" if field_is(p, "name", node) => return Role::Skip,
            "global_statement" => return Role::Global,
            "nonlocal_statement" => return Role::Nonlocal,
            "function_definition" if field_is(p, "name", node) => {
                return Role::Store(BindingKind::FunctionName)
            }
            "class_definition" if field_is(p, "name", node) => {
                return Role::Store(BindingKind::ClassName)
            }
            "dotted_name" | "aliased_import" | "relative_import" => {
                return import_role(node);
            }
            _ => {}
        }
        if is_param_name(node) {
            let mut q = node;
            while let Some(pp) = q.parent() {
                if matches!(pp.kind(), "parameters" | "lambda_parameters") {
                    return Role::Param;
                }
                q = pp;
            }
        }
        let mut cur = node;
        while let Some(p) = cur.parent() {
            match p.kind() {
                "pattern_list" | "tuple_pattern" | "list_pattern" | "list_splat_pattern"
                | "parenthesized_expression" | "tuple" | "list" | "list_splat"
                | "expression_list" => cur = p,
                "assignment" | "augmented_assignment" | "for_statement" | "for_in_clause" => {
                    return if field_is(p, "left", cur) {
                        Role::Store(BindingKind::Variable)
                    } else {
                        Role::Load
                    };
                }
                "as_pattern_target" | "delete_statement" => {
                    return Role::Store(BindingKind::Variable)
                }
                "named_expression" => {
                    return if field_is(p, "name", cur) {
                        Role::Store(BindingKind::Variable)
                    } else {
                        Role::Load
                    };
                }
                _ => return Role::Load,
            }
        }
        Role::Load
    }

    fn import_role(node: Node<'_>) -> Role {
        let mut cur = node;
        while let Some(p) = cur.parent() {
            match p.kind() {
                "import_statement" | "import_from_statement" | "future_import_statement" => {
                    let module_part = field_is(p, "module_name", cur);
                    if module_part {
                        return Role::Skip;
                    }
                    // `import a.b` binds `a`; `x as y` binds `y`.
                    let parent = node.parent().unwrap();
                    return match parent.kind() {
                        "aliased_import" if field_is(parent, "alias", node) => Role::Import,
                        "aliased_import" => Role::Skip,
                        "dotted_name" => {
                            let first = parent.named_child(0).is_some_and(|c| same(c, node));
                            let aliased = parent
                                .parent()
                                .is_some_and(|g| g.kind() == "aliased_import");
                            let binds = match p.kind() {
                                "import_statement" => first,
                                "import_from_statement" => {
                                    parent.named_child_count() == 1
                                        && !field_is(p, "module_name", parent)
                                }
                                _ => false,
                            };
                            if binds && !aliased {
                                Role::Import
                            } else {
                                Role::Skip
                            }
                        }
                        _ => Role::Skip,
                    };
                }
                _ => cur = p,
            }
        }
        // dotted names outside imports (decorators such as `@a.b`) are loads of
        // their first segment only.
        let parent = node.parent().unwrap();
        if parent.kind() == "dotted_name" && parent.named_child(0).is_some_and(|c| same(c, node)) {
            Role::Load
        } else {
            Role::Skip
        }
    }

    fn is_keyword_passable(node: Node<'_>) -> bool {
        let Some(p) = node.parent() else { return false };
        if matches!(p.kind(), "default_parameter" | "typed_default_parameter") {
            return true;
        }
        // After a bare `*` or `*args` everything is keyword-only.
        let mut param = node;
        while let Some(pp) = param.parent() {
            if matches!(pp.kind(), "parameters" | "lambda_parameters") {
                let mut seen_star = false;
                let mut cursor = pp.walk();
                for c in pp.named_children(&mut cursor) {
                    if same(c, param) {
                        return seen_star && !matches!(c.kind(), "dictionary_splat_pattern");
                    }
                    let star = match c.kind() {
                        "keyword_separator" | "list_splat_pattern" => true,
                        "typed_parameter" => c
                            .named_child(0)
                            .is_some_and(|x| x.kind() == "list_splat_pattern"),
                        _ => false,
                    };
                    seen_star |= star;
                }
                return false;
            }
            param = pp;
        }
        false
    }

    pub(super) fn collect(tree: &ParseTree) -> Vec<IdentifierBinding> {
        let nodes = tree.named_nodes();
        let mut scopes: Vec<Scope> = Vec::new();
        let mut scope_index: HashMap<usize, usize> = HashMap::new();

        for node in &nodes {
            if let Some(kind) = scope_kind_of(*node) {
                let parent = node
                    .parent()
                    .map(scope_node)
                    .and_then(|p| scope_index.get(&p.id()).copied());
                scope_index.insert(node.id(), scopes.len());
                scopes.push(Scope {
                    kind,
                    parent,
                    bound: HashMap::new(),
                    imported: HashSet::new(),
                    keyword_passable: HashSet::new(),
                    globals: HashSet::new(),
                    nonlocals: HashSet::new(),
                });
            }
        }
        if scopes.is_empty() {
            return Vec::new();
        }

        let idents: Vec<Node<'_>> = nodes
            .iter()
            .copied()
            .filter(|n| n.kind() == "identifier")
            .collect();
        let scope_of = |n: Node<'_>| scope_index[&scope_node(n).id()];

        // Pass 1: declarations.
        for &id in &idents {
            let name = tree.text(id).to_string();
            let mut s = scope_of(id);
            match role(id) {
                Role::Store(kind) => {
                    // Walrus targets inside comprehensions bind in the enclosing scope.
                    if id.parent().is_some_and(|p| p.kind() == "named_expression") {
                        while scopes[s].kind == ScopeKind::Comprehension {
                            s = scopes[s].parent.unwrap_or(0);
                        }
                    }
                    let entry = scopes[s].bound.entry(name).or_insert(kind);
                    if kind != BindingKind::Variable {
                        *entry = kind;
                    }
                }
                Role::Param => {
                    if is_keyword_passable(id) {
                        scopes[s].keyword_passable.insert(name.clone());
                    }
                    scopes[s].bound.insert(name, BindingKind::Parameter);
                }
                Role::Import => {
                    scopes[s].imported.insert(name.clone());
                    scopes[s].bound.entry(name).or_insert(BindingKind::Variable);
                }
                Role::Global => {
                    scopes[s].globals.insert(name);
                }
                Role::Nonlocal => {
                    scopes[s].nonlocals.insert(name);
                }
                _ => {}
            }
        }

        let resolve = |start: usize, name: &str| -> usize {
            let declared = |s: usize| -> Option<usize> {
                let sc = &scopes[s];
                if sc.globals.contains(name) {
                    return Some(if scopes[0].bound.contains_key(name) { 0 } else { EXTERNAL_SCOPE });
                }
                if sc.bound.contains_key(name) && !sc.nonlocals.contains(name) {
                    return Some(s);
                }
                None
            };
            if let Some(found) = declared(start) {
                return found;
            }
            let mut cur = scopes[start].parent;
            while let Some(s) = cur {
                if scopes[s].kind != ScopeKind::Class {
                    if let Some(found) = declared(s) {
                        return found;
                    }
                }
                cur = scopes[s].parent;
            }
            EXTERNAL_SCOPE
        };

        // Scopes that call locals()/vars()/eval()/exec() cannot have their
        // locals renamed safely.
        let mut dynamic: HashSet<usize> = HashSet::new();
        for &id in &idents {
            let name = tree.text(id);
            if matches!(name, "locals" | "vars" | "eval" | "exec") {
                let mut s = Some(scope_of(id));
                while let Some(x) = s {
                    dynamic.insert(x);
                    s = scopes[x].parent;
                }
            }
        }

        let mut grouper = Grouper::default();
        let mut attribute_groups: HashMap<String, Vec<Range<usize>>> = HashMap::new();
        for &id in &idents {
            let name = tree.text(id);
            let range = id.byte_range();
            match role(id) {
                Role::Skip => continue,
                Role::Attribute => {
                    attribute_groups.entry(name.to_string()).or_default().push(range);
                    continue;
                }
                _ => {}
            }
            let mut s = scope_of(id);
            if id.parent().is_some_and(|p| p.kind() == "named_expression") {
                while scopes[s].kind == ScopeKind::Comprehension {
                    s = scopes[s].parent.unwrap_or(0);
                }
            }
            let target = if matches!(role(id), Role::Nonlocal) {
                scopes[s].parent.map_or(EXTERNAL_SCOPE, |p| resolve(p, name))
            } else {
                resolve(s, name)
            };
            let (scope_kind, kind) = if target == EXTERNAL_SCOPE {
                (ScopeKind::External, BindingKind::Variable)
            } else {
                (scopes[target].kind, scopes[target].bound[name])
            };
            grouper.add(target, scope_kind, name, kind, range);
        }

        let mut out: Vec<IdentifierBinding> = grouper
            .groups
            .into_values()
            .map(|mut b| {
                b.is_reserved = tree.language().is_reserved(&b.name);
                if b.scope != EXTERNAL_SCOPE {
                    let sc = &scopes[b.scope];
                    b.keyword_passable = sc.keyword_passable.contains(&b.name);
                    b.renameable = b.is_local()
                        && matches!(b.kind, BindingKind::Variable | BindingKind::Parameter)
                        && !b.is_reserved
                        && !sc.imported.contains(&b.name)
                        && !dynamic.contains(&b.scope)
                        && !(b.name.starts_with("__") && b.name.ends_with("__"));
                }
                b
            })
            .collect();
        out.extend(attribute_groups.into_iter().map(|(name, occurrences)| IdentifierBinding {
            is_reserved: tree.language().is_reserved(&name),
            name,
            kind: BindingKind::Attribute,
            scope: EXTERNAL_SCOPE,
            scope_kind: ScopeKind::External,
            occurrences,
            renameable: false,
            keyword_passable: false,
        }));
        out
    }
}

mod java {
    use super::*;

    struct Decl {
        name: String,
        kind: BindingKind,
        scope: Range<usize>,
        at: usize,
    }

    fn enclosing_block(node: Node<'_>) -> Option<Node<'_>> {
        let mut cur = node.parent();
        while let Some(p) = cur {
            if matches!(
                p.kind(),
                "block" | "switch_block_statement_group" | "switch_rule" | "constructor_body"
            ) {
                return Some(p);
            }
            cur = p.parent();
        }
        None
    }

    fn declaration(node: Node<'_>) -> Option<(BindingKind, Range<usize>)> {
        let p = node.parent()?;
        match p.kind() {
            "formal_parameter" if field_is(p, "name", node) => {
                // Parameter of a method, constructor or lambda.
                let owner = p.parent()?.parent()?;
                Some((BindingKind::Parameter, owner.byte_range()))
            }
            "variable_declarator" if field_is(p, "name", node) => {
                let decl = p.parent()?;
                match decl.kind() {
                    "local_variable_declaration" => {
                        let holder = decl.parent()?;
                        if holder.kind() == "for_statement" {
                            Some((BindingKind::Variable, holder.byte_range()))
                        } else {
                            let block = enclosing_block(decl)?;
                            Some((BindingKind::Variable, decl.start_byte()..block.end_byte()))
                        }
                    }
                    "spread_parameter" => {
                        let owner = decl.parent()?.parent()?;
                        Some((BindingKind::Parameter, owner.byte_range()))
                    }
                    _ => None,
                }
            }
            "enhanced_for_statement" if field_is(p, "name", node) => {
                Some((BindingKind::Variable, p.byte_range()))
            }
            "catch_formal_parameter" if field_is(p, "name", node) => {
                Some((BindingKind::Variable, p.parent()?.byte_range()))
            }
            "resource" if field_is(p, "name", node) => {
                let try_stmt = p.parent()?.parent()?;
                Some((BindingKind::Variable, try_stmt.byte_range()))
            }
            "lambda_expression" if field_is(p, "parameters", node) => {
                Some((BindingKind::Parameter, p.byte_range()))
            }
            "inferred_parameters" => Some((BindingKind::Parameter, p.parent()?.byte_range())),
            _ => None,
        }
    }

    fn is_reference_position(node: Node<'_>) -> bool {
        let Some(p) = node.parent() else { return true };
        !matches!(
            (p.kind(), field_name(p, node).as_deref()),
            ("field_access", Some("field"))
                | ("method_invocation", Some("name"))
                | ("method_declaration", Some("name"))
                | ("constructor_declaration", Some("name"))
                | ("class_declaration", Some("name"))
                | ("enum_declaration", Some("name"))
                | ("interface_declaration", Some("name"))
                | ("record_declaration", Some("name"))
                | ("annotation_type_declaration", Some("name"))
                | ("method_reference", _)
                | ("labeled_statement", _)
                | ("break_statement", _)
                | ("continue_statement", _)
                | ("marker_annotation", _)
                | ("annotation", _)
                | ("scoped_identifier", _)
                | ("import_declaration", _)
                | ("package_declaration", _)
                | ("enum_constant", _)
                | ("element_value_pair", _)
        ) && !(p.kind() == "variable_declarator"
            && p.parent().is_some_and(|d| d.kind() == "field_declaration"))
    }

    fn field_name(parent: Node<'_>, child: Node<'_>) -> Option<String> {
        let mut cursor = parent.walk();
        for (i, c) in parent.children(&mut cursor).enumerate() {
            if same(c, child) {
                return parent.field_name_for_child(i as u32).map(str::to_string);
            }
        }
        None
    }

    pub(super) fn collect(tree: &ParseTree) -> Vec<IdentifierBinding> {
        let nodes = tree.named_nodes();
        let idents: Vec<Node<'_>> = nodes
            .iter()
            .copied()
            .filter(|n| n.kind() == "identifier")
            .collect();

        let mut decls: Vec<Decl> = Vec::new();
        for &id in &idents {
            if let Some((kind, scope)) = declaration(id) {
                decls.push(Decl {
                    name: tree.text(id).to_string(),
                    kind,
                    scope,
                    at: id.start_byte(),
                });
            }
        }

        let mut grouper = Grouper::default();
        let mut attribute_groups: HashMap<String, Vec<Range<usize>>> = HashMap::new();
        for &id in &idents {
            let name = tree.text(id);
            let range = id.byte_range();
            let parent_kind = id.parent().map(|p| p.kind());
            if parent_kind == Some("field_access")
                && id.parent().is_some_and(|p| field_is(p, "field", id))
            {
                attribute_groups.entry(name.to_string()).or_default().push(range);
                continue;
            }
            if !is_reference_position(id) {
                continue;
            }
            let pos = id.start_byte();
            let found = decls
                .iter()
                .enumerate()
                .filter(|(_, d)| d.name == name && d.scope.contains(&pos) && d.at <= pos)
                .min_by_key(|(_, d)| d.scope.len());
            match found {
                Some((idx, d)) => {
                    let scope_kind = ScopeKind::Block;
                    grouper.add(idx, scope_kind, name, d.kind, range);
                }
                None => {
                    grouper.add(EXTERNAL_SCOPE, ScopeKind::External, name, BindingKind::Variable, range);
                }
            }
        }

        let mut out: Vec<IdentifierBinding> = grouper
            .groups
            .into_values()
            .map(|mut b| {
                b.is_reserved = tree.language().is_reserved(&b.name);
                b.renameable = b.scope != EXTERNAL_SCOPE && !b.is_reserved;
                b
            })
            .collect();
        out.extend(attribute_groups.into_iter().map(|(name, occurrences)| IdentifierBinding {
            is_reserved: tree.language().is_reserved(&name),
            name,
            kind: BindingKind::Attribute,
            scope: EXTERNAL_SCOPE,
            scope_kind: ScopeKind::External,
            occurrences,
            renameable: false,
            keyword_passable: false,
        }));
        out
    }
}

/// Byte ranges of identifier tokens whose text equals `name`, in any role.
pub fn identifier_token_ranges(tree: &ParseTree, name: &str) -> BTreeSet<(usize, usize)> {
    tree.named_nodes()
        .into_iter()
        .filter(|n| n.kind() == "identifier" && tree.text(*n) == name)
        .map(|n| (n.start_byte(), n.end_byte()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn py(src: &str) -> Vec<IdentifierBinding> {
        collect_identifiers(&parse(src, Language::Python).unwrap())
    }

    fn find<'a>(bs: &'a [IdentifierBinding], name: &str) -> Vec<&'a IdentifierBinding> {
        bs.iter().filter(|b| b.name == name).collect()
    }

    #[test]
    fn locals_and_params_are_renameable() {
        let bs = py("def f(a, b=1, *, c):\n    x = a + b\n    return x + c\n");
        let x = find(&bs, "x")[0];
        assert!(x.renameable);
        assert_eq!(x.occurrences.len(), 2);
        assert_eq!(find(&bs, "a")[0].kind, BindingKind::Parameter);
        assert!(!find(&bs, "a")[0].keyword_passable);
        assert!(find(&bs, "b")[0].keyword_passable);
        assert!(find(&bs, "c")[0].keyword_passable);
        let f = find(&bs, "f")[0];
        assert_eq!(f.kind, BindingKind::FunctionName);
        assert!(!f.renameable);
    }

    #[test]
    fn builtin_misuse_is_reserved() {
        let bs = py("def f():\n    while open:\n        pass\n");
        let open = find(&bs, "open")[0];
        assert!(open.is_reserved);
        assert!(!open.renameable);
    }

    #[test]
    fn shadowing_splits_occurrences_per_scope() {
        let src = "\
def outer(items):
    total = 0
    def inner(total):
        total = total + 1
        return total
    for x in items:
        total = total + inner(x)
    return total
";
        let bs = py(src);
        let totals = find(&bs, "total");
        assert_eq!(totals.len(), 2);
        let mut counts: Vec<_> = totals.iter().map(|b| b.occurrences.len()).collect();
        counts.sort();
        assert_eq!(counts, [4, 4]);
        assert!(totals.iter().all(|b| b.renameable));
        assert_ne!(totals[0].scope, totals[1].scope);
    }

    #[test]
    fn attributes_keywords_strings_and_comments_are_not_occurrences() {
        let src = "def f(row):\n    row.row = g(row=1)  # row\n    return 'row' + row\n";
        let bs = py(src);
        let row: Vec<_> = find(&bs, "row")
            .into_iter()
            .filter(|b| b.kind != BindingKind::Attribute)
            .collect();
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].occurrences.len(), 3);
        let attr = bs
            .iter()
            .find(|b| b.kind == BindingKind::Attribute && b.name == "row")
            .unwrap();
        assert_eq!(attr.occurrences.len(), 1);
    }

    #[test]
    fn nonlocal_and_global_resolution() {
        let src = "\
G = 1
def f():
    global G
    n = 0
    def g():
        nonlocal n
        n += G
    g()
    return n
";
        let bs = py(src);
        let n = find(&bs, "n");
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].occurrences.len(), 4);
        let g = find(&bs, "G");
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].scope_kind, ScopeKind::Module);
        assert!(!g[0].renameable);
    }

    #[test]
    fn comprehension_variables_live_in_their_own_scope() {
        let src = "def f(xs):\n    x = 1\n    ys = [x for x in xs]\n    return x, ys\n";
        let bs = py(src);
        let xs = find(&bs, "x");
        assert_eq!(xs.len(), 2);
        assert!(xs.iter().any(|b| b.scope_kind == ScopeKind::Comprehension));
    }

    #[test]
    fn class_scope_is_skipped_for_methods() {
        let src = "class A:\n    y = 1\n    def m(self):\n        return y\n";
        let bs = py(src);
        let ys = find(&bs, "y");
        assert_eq!(ys.len(), 2);
        assert!(ys.iter().any(|b| b.scope_kind == ScopeKind::Class));
        assert!(ys.iter().any(|b| b.scope_kind == ScopeKind::External));
    }

    #[test]
    fn dynamic_scope_blocks_renaming() {
        let bs = py("def f():\n    x = 1\n    return locals()\n");
        assert!(!find(&bs, "x")[0].renameable);
    }

    #[test]
    fn imports_are_not_renameable() {
        let bs = py("def f():\n    import os.path\n    from a import b as c\n    return os, c\n");
        assert!(!find(&bs, "os")[0].renameable);
        assert!(!find(&bs, "c")[0].renameable);
        assert!(find(&bs, "a").is_empty());
        let bs = py("def f():\n    from os import path\n    return path\n");
        assert!(find(&bs, "os").is_empty());
        assert_eq!(find(&bs, "path")[0].occurrences.len(), 2);
    }

    #[test]
    fn java_locals_params_and_fields() {
        let src = "class A {\n  int x;\n  int f(int x, int y) {\n    int z = x + this.x;\n    for (int i = 0; i < y; i++) { z += i; }\n    for (int i = 0; i < 2; i++) { z -= i; }\n    return z;\n  }\n}\n";
        let tree = parse(src, Language::Java).unwrap();
        let bs = collect_identifiers(&tree);
        let x: Vec<_> = bs.iter().filter(|b| b.name == "x").collect();
        let param = x.iter().find(|b| b.kind == BindingKind::Parameter).unwrap();
        assert_eq!(param.occurrences.len(), 2);
        assert!(x.iter().any(|b| b.kind == BindingKind::Attribute));
        let is: Vec<_> = bs.iter().filter(|b| b.name == "i").collect();
        assert_eq!(is.len(), 2);
        assert!(is.iter().all(|b| b.occurrences.len() == 4 && b.renameable));
        let z = bs.iter().find(|b| b.name == "z").unwrap();
        assert_eq!(z.occurrences.len(), 4);
    }
}
