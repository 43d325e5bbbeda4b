use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{AstExpr, BinOp, Binding, Ident, Item, Kind};
use super::expr::{Expr, Func};
use super::program::*;
use super::{Ast, ResolveError};
use crate::Span;

#[derive(Clone, Copy)]
enum Decl {
    Channel(ChannelId),
    Image(ImageId),
    Task,
}

fn declare<'a>(names: &mut BTreeMap<&'a str, (Decl, Span)>, id: &'a Ident, decl: Decl) -> Result<(), ResolveError> {
    if let Some((_, first)) = names.get(id.name.as_str()) {
        return Err(ResolveError::DuplicateName { name: id.name.clone(), span: id.span, first: *first });
    }
    names.insert(&id.name, (decl, id.span));
    Ok(())
}

/// Binds every name in `ast` and checks the per-kind arity rules.
pub fn resolve(ast: &Ast) -> Result<Program, ResolveError> {
    let mut names: BTreeMap<&str, (Decl, Span)> = BTreeMap::new();

    let mut vector_length: Option<(u32, Span)> = None;
    let mut channels = Vec::new();
    let mut image_items = Vec::new();
    let mut task_items = Vec::new();

    for item in &ast.items {
        match item {
            Item::VectorLength { value, span } => {
                if let Some((_, first)) = vector_length {
                    return Err(ResolveError::DuplicateName { name: "vector_length".into(), span: *span, first });
                }
                let v = u32::try_from(*value)
                    .ok()
                    .filter(|v| *v > 0)
                    .ok_or(ResolveError::InvalidVectorLength { value: *value, span: *span })?;
                vector_length = Some((v, *span));
            }
            Item::Channel { name, depth } => {
                declare(&mut names, name, Decl::Channel(ChannelId(channels.len())))?;
                let depth = match depth {
                    None => None,
                    Some(d) => Some(u32::try_from(*d).ok().filter(|d| *d >= 2).ok_or_else(|| {
                        ResolveError::InvalidDepth { channel: name.name.clone(), depth: *d, span: name.span }
                    })?),
                };
                channels.push(ChannelDecl { name: name.name.clone(), elem_width: 1, depth, span: name.span });
            }
            Item::Image { name, .. } => {
                declare(&mut names, name, Decl::Image(ImageId(image_items.len())))?;
                image_items.push(item);
            }
            Item::Task { name, .. } => {
                declare(&mut names, name, Decl::Task)?;
                task_items.push(item);
            }
        }
    }

    let mut images = Vec::new();
    let mut dims: Option<(u32, u32, &str)> = None;
    for item in image_items {
        let Item::Image { name, width, height, binding } = item else { unreachable!() };
        let (w, h) = match (u32::try_from(*width), u32::try_from(*height)) {
            (Ok(w), Ok(h)) if w > 0 && h > 0 => (w, h),
            _ => {
                return Err(ResolveError::ImageSize {
                    image: name.name.clone(),
                    reason: format!("size {width}x{height} must be positive and fit in 32 bits"),
                    span: name.span,
                })
            }
        };
        match dims {
            None => dims = Some((w, h, &name.name)),
            Some((w0, h0, first)) if (w0, h0) != (w, h) => {
                return Err(ResolveError::ImageSize {
                    image: name.name.clone(),
                    reason: format!("size {w}x{h} differs from {w0}x{h0} of `{first}`; all images share one size"),
                    span: name.span,
                });
            }
            Some(_) => {}
        }
        let binding = match binding {
            Binding::Input(p) => ImageBinding::HostInput(p.clone()),
            Binding::Output(p) => ImageBinding::HostOutput(p.clone()),
            Binding::Virtual(chan) => match names.get(chan.name.as_str()) {
                Some((Decl::Channel(c), _)) => ImageBinding::Virtual(*c),
                _ => {
                    return Err(ResolveError::VirtualWithoutChannel {
                        image: name.name.clone(),
                        channel: chan.name.clone(),
                        span: chan.span,
                    })
                }
            },
        };
        images.push(ImageDecl { name: name.name.clone(), width: w, height: h, binding, span: name.span });
    }

    let lookup_port = |id: &Ident| -> Result<Port, ResolveError> {
        match names.get(id.name.as_str()) {
            Some((Decl::Channel(c), _)) => Ok(Port::Channel(*c)),
            Some((Decl::Image(i), _)) => Ok(match images[i.0].binding {
                ImageBinding::Virtual(c) => Port::Channel(c),
                _ => Port::Image(*i),
            }),
            _ => Err(ResolveError::UnboundName { name: id.name.clone(), span: id.span }),
        }
    };

    let mut tasks = Vec::new();
    for item in task_items {
        let Item::Task { name, kind, reads, writes } = item else { unreachable!() };
        let read_ports = reads.iter().map(lookup_port).collect::<Result<Vec<_>, _>>()?;
        let write_ports = writes.iter().map(lookup_port).collect::<Result<Vec<_>, _>>()?;
        for (id, port) in reads.iter().zip(&read_ports) {
            if let Port::Image(i) = port {
                if images[i.0].is_output() {
                    return Err(ResolveError::ImageDirection {
                        task: name.name.clone(),
                        image: id.name.clone(),
                        reason: "reads a host output image",
                        span: id.span,
                    });
                }
            }
        }
        for (id, port) in writes.iter().zip(&write_ports) {
            if let Port::Image(i) = port {
                if images[i.0].is_input() {
                    return Err(ResolveError::ImageDirection {
                        task: name.name.clone(),
                        image: id.name.clone(),
                        reason: "writes a host input image",
                        span: id.span,
                    });
                }
            }
        }
        let kind = resolve_kind(&name.name, kind)?;
        if !kind.arity_ok(read_ports.len(), write_ports.len()) {
            return Err(ResolveError::ArityMismatch {
                task: name.name.clone(),
                kind: kind.keyword(),
                rule: kind.arity_rule(),
                reads: read_ports.len(),
                writes: write_ports.len(),
                span: name.span,
            });
        }
        tasks.push(TaskDecl { name: name.name.clone(), kind, reads: read_ports, writes: write_ports, span: name.span });
    }

    let (width, height) = dims.map(|(w, h, _)| (w, h)).unwrap_or((0, 0));
    Ok(Program {
        channels,
        images,
        tasks,
        vector_length: vector_length.map(|(v, _)| v).unwrap_or(1),
        width,
        height,
        default_fifo_depth: DEFAULT_FIFO_DEPTH,
    })
}

fn resolve_kind(task: &str, kind: &Kind) -> Result<TaskKind, ResolveError> {
    Ok(match kind {
        Kind::Point(e) => TaskKind::Point(resolve_expr(task, e, &["pix"])?),
        Kind::Point2(e) => TaskKind::Point2(resolve_expr(task, e, &["pix1", "pix2"])?),
        Kind::Local { size, size_span, coeffs, divisor, divisor_span } => {
            let invalid =
                |reason: String, span: Span| ResolveError::InvalidStencil { task: task.to_string(), reason, span };
            if *size < 3 || size % 2 == 0 || *size > 31 {
                return Err(invalid(format!("mask size {size} must be odd and between 3 and 31"), *size_span));
            }
            let expected = (size * size) as usize;
            if coeffs.len() != expected {
                return Err(invalid(
                    format!("a {size}x{size} mask needs {expected} coefficients, found {}", coeffs.len()),
                    *size_span,
                ));
            }
            let coeffs = coeffs
                .iter()
                .map(|c| i32::try_from(*c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| invalid("mask coefficient out of 32-bit range".into(), *size_span))?;
            let divisor = match divisor {
                None => 1,
                Some(0) => return Err(ResolveError::DivisionByZero { task: task.to_string(), span: *divisor_span }),
                Some(d) => {
                    i32::try_from(*d).map_err(|_| invalid("mask divisor out of 32-bit range".into(), *divisor_span))?
                }
            };
            TaskKind::Local(Stencil { size: *size as u32, coeffs, divisor })
        }
        Kind::Split { fanout, span } => {
            if *fanout < 2 || *fanout > u64::from(u32::MAX) {
                return Err(ResolveError::ArityMismatch {
                    task: task.to_string(),
                    kind: "split",
                    rule: "a fan-out of at least 2",
                    reads: 1,
                    writes: *fanout as usize,
                    span: *span,
                });
            }
            TaskKind::Split(*fanout as u32)
        }
        Kind::Read => TaskKind::Read,
        Kind::Write => TaskKind::Write,
    })
}

fn resolve_expr(task: &str, e: &AstExpr, operands: &[&str]) -> Result<Expr, ResolveError> {
    let recur = |x: &AstExpr| resolve_expr(task, x, operands).map(Box::new);
    Ok(match e {
        AstExpr::Int(n, span) => {
            Expr::Lit(i32::try_from(*n).map_err(|_| ResolveError::IntegerOutOfRange { span: *span })?)
        }
        AstExpr::Neg(inner, span) => match &**inner {
            // `-2147483648` is representable even though its magnitude is not.
            AstExpr::Int(n, _) => {
                let v = -(i64::try_from(*n).unwrap_or(i64::MAX));
                Expr::Lit(i32::try_from(v).map_err(|_| ResolveError::IntegerOutOfRange { span: *span })?)
            }
            _ => Expr::Neg(recur(inner)?),
        },
        AstExpr::Var(id) => match operands.iter().position(|o| *o == id.name) {
            Some(i) => Expr::Operand(i as u8),
            None => return Err(ResolveError::UnboundName { name: id.name.clone(), span: id.span }),
        },
        AstExpr::Binary(op, a, b) => {
            let rhs = recur(b)?;
            if *op == BinOp::Div && *rhs == Expr::Lit(0) {
                return Err(ResolveError::DivisionByZero { task: task.to_string(), span: b.span() });
            }
            Expr::Binary(*op, recur(a)?, rhs)
        }
        AstExpr::Call(id, args) => {
            let func = Func::from_name(&id.name).ok_or_else(|| ResolveError::BadCall {
                name: id.name.clone(),
                reason: "unknown function; expected min, max, abs or clamp".into(),
                span: id.span,
            })?;
            if args.len() != func.arity() {
                return Err(ResolveError::BadCall {
                    name: id.name.clone(),
                    reason: format!("takes {} argument(s), found {}", func.arity(), args.len()),
                    span: id.span,
                });
            }
            Expr::Call(func, args.iter().map(|a| resolve_expr(task, a, operands)).collect::<Result<_, _>>()?)
        }
    })
}
