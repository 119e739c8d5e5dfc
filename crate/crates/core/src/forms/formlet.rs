use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::html::{Html, Tag};

/// Submitted form data: field name to raw string.
pub type Inputs = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub type Collected<T> = Result<T, Vec<ValidationError>>;

type RenderFn = dyn Fn(usize) -> Vec<Html> + Send + Sync;
type CollectFn<T> = dyn Fn(usize, &Inputs) -> Collected<T> + Send + Sync;

pub fn field_name(index: usize) -> String {
    format!("f{index}")
}

/// A form fragment paired with the code that reads its fields back.
///
/// Fields are named `f<i>` by position. Rendering and collecting at the
/// same first index always agree on those names.
pub struct Formlet<T> {
    defaults: Vec<String>,
    render: Arc<RenderFn>,
    collect: Arc<CollectFn<T>>,
}

impl<T> Clone for Formlet<T> {
    fn clone(&self) -> Self {
        Formlet { defaults: self.defaults.clone(), render: self.render.clone(), collect: self.collect.clone() }
    }
}

impl<T> fmt::Debug for Formlet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Formlet").field("defaults", &self.defaults).finish_non_exhaustive()
    }
}

/// Markup-only wrappers that never change what a formlet collects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enhancer {
    TextLabel(String),
    ValidationIcon,
    SubmitAndResetButtons,
    FormContainer,
}

/// A text field showing `default`. A missing field collects as the
/// default.
pub fn input(default: impl Into<String>) -> Formlet<String> {
    let default = default.into();
    let shown = default.clone();
    let fallback = default.clone();
    Formlet {
        defaults: vec![default],
        render: Arc::new(move |i| {
            let attrs = [("type", "text".to_string()), ("name", field_name(i)), ("value", shown.clone())];
            vec![Html::element(Tag::Input, attrs, vec![]).expect("fixed attribute set")]
        }),
        collect: Arc::new(move |i, inputs| Ok(inputs.get(&field_name(i)).cloned().unwrap_or_else(|| fallback.clone()))),
    }
}

/// An optional `-` then ASCII digits, within the `i64` range.
pub fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl<T: 'static> Formlet<T> {
    pub fn field_count(&self) -> usize {
        self.defaults.len()
    }

    /// Default string of each field, in field order.
    pub fn defaults(&self) -> &[String] {
        &self.defaults
    }

    /// Field names used when rendered at `first`.
    pub fn field_names(&self, first: usize) -> Vec<String> {
        (first..first + self.field_count()).map(field_name).collect()
    }

    /// Markup with fields numbered from `first`.
    pub fn render_at(&self, first: usize) -> Vec<Html> {
        (self.render)(first)
    }

    pub fn collect_at(&self, first: usize, inputs: &Inputs) -> Collected<T> {
        (self.collect)(first, inputs)
    }

    pub fn collect(&self, inputs: &Inputs) -> Collected<T> {
        self.collect_at(0, inputs)
    }

    pub fn map<U: 'static>(self, f: impl Fn(T) -> U + Send + Sync + 'static) -> Formlet<U> {
        let collect = self.collect;
        Formlet {
            defaults: self.defaults,
            render: self.render,
            collect: Arc::new(move |i, inputs| collect(i, inputs).map(&f)),
        }
    }

    /// Both formlets side by side in one `<div>`; errors from both sides
    /// are reported, `self`'s first.
    pub fn pair<U: 'static>(self, other: Formlet<U>) -> Formlet<(T, U)> {
        let offset = self.field_count();
        let (ra, rb) = (self.render, other.render);
        let (ca, cb) = (self.collect, other.collect);
        let mut defaults = self.defaults;
        defaults.extend(other.defaults);
        Formlet {
            defaults,
            render: Arc::new(move |i| {
                let mut nodes = ra(i);
                nodes.extend(rb(i + offset));
                vec![Html::div(nodes)]
            }),
            collect: Arc::new(move |i, inputs| match (ca(i, inputs), cb(i + offset, inputs)) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                (a, b) => Err(a.err().into_iter().chain(b.err()).flatten().collect()),
            }),
        }
    }

    pub fn enhance(self, e: Enhancer) -> Formlet<T> {
        let inner = self.render;
        let render: Arc<RenderFn> = match e {
            Enhancer::TextLabel(label) => Arc::new(move |i| {
                let l = Html::element(Tag::Label, [("for", field_name(i))], vec![Html::text(label.clone())]);
                let mut nodes = vec![l.expect("fixed attribute set")];
                nodes.extend(inner(i));
                nodes
            }),
            Enhancer::ValidationIcon => Arc::new(move |i| {
                let mut nodes = inner(i);
                let icon = Html::element(Tag::Span, [("class", "validation-icon")], vec![]);
                nodes.push(icon.expect("fixed attribute set"));
                nodes
            }),
            Enhancer::SubmitAndResetButtons => Arc::new(move |i| {
                let button = |kind: &str, label: &str| {
                    Html::element(Tag::Button, [("type", kind)], vec![Html::text(label)]).expect("fixed attribute set")
                };
                let mut nodes = inner(i);
                nodes.push(Html::div(vec![button("submit", "Submit"), button("reset", "Reset")]));
                nodes
            }),
            Enhancer::FormContainer => Arc::new(move |i| {
                let set = Html::element(Tag::Fieldset, [("class", "form-container")], inner(i));
                vec![set.expect("fixed attribute set")]
            }),
        };
        Formlet { defaults: self.defaults, render, collect: self.collect }
    }

    pub fn with_text_label(self, label: impl Into<String>) -> Formlet<T> {
        self.enhance(Enhancer::TextLabel(label.into()))
    }

    pub fn with_validation_icon(self) -> Formlet<T> {
        self.enhance(Enhancer::ValidationIcon)
    }

    pub fn with_submit_and_reset_buttons(self) -> Formlet<T> {
        self.enhance(Enhancer::SubmitAndResetButtons)
    }

    pub fn with_form_container(self) -> Formlet<T> {
        self.enhance(Enhancer::FormContainer)
    }
}

impl Formlet<String> {
    /// Accepts integers as [`parse_int`] does; anything else fails on the
    /// first field with `message`.
    pub fn is_int(self, message: impl Into<String>) -> Formlet<i64> {
        let message = message.into();
        let collect = self.collect;
        Formlet {
            defaults: self.defaults,
            render: self.render,
            collect: Arc::new(move |i, inputs| {
                let s = collect(i, inputs)?;
                parse_int(&s).ok_or_else(|| vec![ValidationError { field: field_name(i), message: message.clone() }])
            }),
        }
    }
}

/// Collects `f` rendered at index 0.
pub fn run_formlet<T: 'static>(f: &Formlet<T>, inputs: &Inputs) -> Collected<T> {
    f.collect(inputs)
}
