//! Generic SSA intermediate representation.
//!
//! A [`ModuleIR`] owns a list of top-level `func.func` operations and a
//! [`ValueTable`] recording the type and defining site of every SSA value.
//! Operations are generic containers (dialect, name, operands, results,
//! attributes, regions); their shapes are checked against the signatures
//! registered in [`crate::dialects`].
//!
//! Regions always hold exactly one block. Dominance is therefore textual
//! order plus visibility of values from enclosing blocks.

mod print;
mod rewrite;
mod verify;

pub use print::{print_ir, value_numbering};
pub use rewrite::{
    apply_patterns, apply_patterns_with, ApplyOptions, PassResult, Rewrite, RewritePattern,
    WorklistOrder,
};
pub use verify::{verify, verify_with, Diagnostic};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The type lattice of the IR.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeKind {
    F32,
    Index,
    /// Dynamically sized 1-D buffer of f32, `memref<-1xf32>`.
    MemRefF32Dyn,
    /// One m1 vector register of f32 lanes, `!rvv.vfloat32m1`.
    RvvVecF32M1,
    /// `!emitc.ptr<elem>`; only f32 elements exist here.
    EmitCPtr(Box<TypeKind>),
    /// `!emitc.opaque<"text">`, a verbatim C type spelling.
    EmitCOpaque(String),
}

impl TypeKind {
    pub fn f32_ptr() -> Self {
        TypeKind::EmitCPtr(Box::new(TypeKind::F32))
    }

    pub fn opaque(text: impl Into<String>) -> Self {
        TypeKind::EmitCOpaque(text.into())
    }

    /// Checks the structural invariants of the type itself.
    pub fn check(&self) -> Result<(), String> {
        match self {
            TypeKind::EmitCPtr(elem) if **elem != TypeKind::F32 => {
                Err(format!("pointer element must be f32, found {elem}"))
            }
            TypeKind::EmitCOpaque(text) if text.is_empty() => {
                Err("opaque type spelling is empty".to_string())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeKind::F32 => f.write_str("f32"),
            TypeKind::Index => f.write_str("index"),
            TypeKind::MemRefF32Dyn => f.write_str("memref<-1xf32>"),
            TypeKind::RvvVecF32M1 => f.write_str("!rvv.vfloat32m1"),
            TypeKind::EmitCPtr(elem) => write!(f, "!emitc.ptr<{elem}>"),
            TypeKind::EmitCOpaque(text) => write!(f, "!emitc.opaque<\"{text}\">"),
        }
    }
}

/// An SSA value handle. Ids are allocated by the [`ValueTable`] and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(u32);

impl Value {
    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Where a value is defined, relative to its owner (block or operation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefSite {
    BlockArg(usize),
    OpResult(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueInfo {
    pub ty: TypeKind,
    pub def: DefSite,
}

/// Type and definition-site record for every value of a module.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValueTable {
    entries: Vec<ValueInfo>,
}

impl ValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&mut self, ty: TypeKind, def: DefSite) -> Value {
        let id = u32::try_from(self.entries.len()).expect("value id space exhausted");
        self.entries.push(ValueInfo { ty, def });
        Value(id)
    }

    pub fn block_arg(&mut self, ty: TypeKind, position: usize) -> Value {
        self.create(ty, DefSite::BlockArg(position))
    }

    pub fn get(&self, v: Value) -> Option<&ValueInfo> {
        self.entries.get(v.index())
    }

    /// Type of `v`. Panics on a value from another module.
    pub fn ty(&self, v: Value) -> &TypeKind {
        &self.entries[v.index()].ty
    }

    pub fn set_type(&mut self, v: Value, ty: TypeKind) {
        self.entries[v.index()].ty = ty;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Value, &ValueInfo)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, info)| (Value(i as u32), info))
    }
}

/// Attribute payloads. Deliberately flat: no nested dictionaries.
#[derive(Debug, Clone, PartialEq)]
pub enum Attribute {
    Int(i64),
    Float(f64),
    Str(String),
    Type(TypeKind),
}

impl Attribute {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Attribute::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Attribute::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attribute::Int(v) => write!(f, "{v}"),
            Attribute::Float(v) => write!(f, "{v:?}"),
            Attribute::Str(s) => write!(f, "{s:?}"),
            Attribute::Type(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Block {
    pub arguments: Vec<Value>,
    pub operations: Vec<Operation>,
}

impl Block {
    pub fn new(arguments: Vec<Value>, operations: Vec<Operation>) -> Self {
        Block { arguments, operations }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Region {
    pub blocks: Vec<Block>,
}

impl Region {
    pub fn single(block: Block) -> Self {
        Region { blocks: vec![block] }
    }

    /// The entry block. Every region built by this crate has exactly one.
    pub fn block(&self) -> &Block {
        &self.blocks[0]
    }

    pub fn block_mut(&mut self) -> &mut Block {
        &mut self.blocks[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub dialect: String,
    pub name: String,
    pub operands: Vec<Value>,
    pub results: Vec<Value>,
    pub attributes: BTreeMap<String, Attribute>,
    pub regions: Vec<Region>,
}

impl Operation {
    pub fn builder(dialect: &str, name: &str) -> OperationBuilder {
        OperationBuilder {
            op: Operation {
                dialect: dialect.to_string(),
                name: name.to_string(),
                operands: Vec::new(),
                results: Vec::new(),
                attributes: BTreeMap::new(),
                regions: Vec::new(),
            },
            result_types: Vec::new(),
        }
    }

    pub fn is(&self, dialect: &str, name: &str) -> bool {
        self.dialect == dialect && self.name == name
    }

    pub fn full_name(&self) -> String {
        format!("{}.{}", self.dialect, self.name)
    }

    pub fn attr(&self, key: &str) -> Option<&Attribute> {
        self.attributes.get(key)
    }

    pub fn result(&self) -> Value {
        self.results[0]
    }

    /// Pre-order walk over this operation and everything nested inside it.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Operation)) {
        f(self);
        for region in &self.regions {
            for block in &region.blocks {
                for op in &block.operations {
                    op.walk(f);
                }
            }
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Operation)) {
        f(self);
        for region in &mut self.regions {
            for block in &mut region.blocks {
                for op in &mut block.operations {
                    op.walk_mut(f);
                }
            }
        }
    }
}

/// Incremental constructor for [`Operation`]; result values are allocated on `finish`.
#[derive(Debug)]
pub struct OperationBuilder {
    op: Operation,
    result_types: Vec<TypeKind>,
}

impl OperationBuilder {
    pub fn operand(mut self, v: Value) -> Self {
        self.op.operands.push(v);
        self
    }

    pub fn operands(mut self, vs: impl IntoIterator<Item = Value>) -> Self {
        self.op.operands.extend(vs);
        self
    }

    pub fn result(mut self, ty: TypeKind) -> Self {
        self.result_types.push(ty);
        self
    }

    pub fn results(mut self, tys: impl IntoIterator<Item = TypeKind>) -> Self {
        self.result_types.extend(tys);
        self
    }

    pub fn attr(mut self, key: &str, value: Attribute) -> Self {
        self.op.attributes.insert(key.to_string(), value);
        self
    }

    pub fn region(mut self, region: Region) -> Self {
        self.op.regions.push(region);
        self
    }

    pub fn finish(mut self, values: &mut ValueTable) -> Operation {
        self.op.results = self
            .result_types
            .into_iter()
            .enumerate()
            .map(|(i, ty)| values.create(ty, DefSite::OpResult(i)))
            .collect();
        self.op
    }
}

/// A module: top-level functions plus the table of all values they define.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModuleIR {
    pub functions: Vec<Operation>,
    pub values: ValueTable,
}

impl ModuleIR {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ty(&self, v: Value) -> &TypeKind {
        self.values.ty(v)
    }

    pub fn walk<'a>(&'a self, mut f: impl FnMut(&'a Operation)) {
        for func in &self.functions {
            func.walk(&mut f);
        }
    }

    pub fn walk_mut(&mut self, mut f: impl FnMut(&mut Operation)) {
        for func in &mut self.functions {
            func.walk_mut(&mut f);
        }
    }

    pub fn op_count(&self) -> usize {
        let mut n = 0;
        self.walk(|_| n += 1);
        n
    }

    /// Count of operations per `(dialect, name)`.
    pub fn op_census(&self) -> BTreeMap<(String, String), usize> {
        let mut census = BTreeMap::new();
        self.walk(|op| {
            *census
                .entry((op.dialect.clone(), op.name.clone()))
                .or_insert(0) += 1;
        });
        census
    }

    /// The set of dialects that still have operations in the module.
    pub fn dialects(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.walk(|op| {
            set.insert(op.dialect.clone());
        });
        set
    }

    pub fn count_ops(&self, dialect: &str, name: &str) -> usize {
        let mut n = 0;
        self.walk(|op| {
            if op.is(dialect, name) {
                n += 1;
            }
        });
        n
    }

    /// Values that are actually referenced from the operation tree, either as
    /// definitions or uses. Retyping passes only touch these.
    pub fn live_values(&self) -> BTreeSet<Value> {
        let mut set = BTreeSet::new();
        self.walk(|op| {
            set.extend(op.operands.iter().copied());
            set.extend(op.results.iter().copied());
            for region in &op.regions {
                for block in &region.blocks {
                    set.extend(block.arguments.iter().copied());
                }
            }
        });
        set
    }

    pub fn function(&self, name: &str) -> Option<&Operation> {
        self.functions
            .iter()
            .find(|f| f.attr("sym_name").and_then(Attribute::as_str) == Some(name))
    }
}
