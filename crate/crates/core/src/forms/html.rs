use std::fmt;

use thiserror::Error;

/// The element names the layout language can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Div,
    P,
    Input,
    Label,
    Span,
    Button,
    Fieldset,
    Form,
}

impl Tag {
    pub const ALL: [Tag; 8] =
        [Tag::Div, Tag::P, Tag::Input, Tag::Label, Tag::Span, Tag::Button, Tag::Fieldset, Tag::Form];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Div => "div",
            Tag::P => "p",
            Tag::Input => "input",
            Tag::Label => "label",
            Tag::Span => "span",
            Tag::Button => "button",
            Tag::Fieldset => "fieldset",
            Tag::Form => "form",
        }
    }

    pub fn from_name(name: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Void elements have no children and close themselves.
    pub fn is_void(self) -> bool {
        self == Tag::Input
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HtmlError {
    #[error("attribute {0:?} given twice")]
    DuplicateAttr(String),
    #[error("invalid attribute name {0:?}")]
    BadAttrName(String),
    #[error("<{0}> cannot have children")]
    VoidChildren(Tag),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Html {
    Element { tag: Tag, attrs: Vec<(String, String)>, children: Vec<Html> },
    Text(String),
}

fn valid_attr_name(name: &str) -> bool {
    let mut bytes = name.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

impl Html {
    /// Checks that attribute names are lowercase and unique and that void
    /// elements have no children.
    pub fn element<K, V>(
        tag: Tag,
        attrs: impl IntoIterator<Item = (K, V)>,
        children: Vec<Html>,
    ) -> Result<Html, HtmlError>
    where
        K: Into<String>,
        V: Into<String>,
    {
        let mut list: Vec<(String, String)> = Vec::new();
        for (k, v) in attrs {
            let k = k.into();
            if !valid_attr_name(&k) {
                return Err(HtmlError::BadAttrName(k));
            }
            if list.iter().any(|(n, _)| *n == k) {
                return Err(HtmlError::DuplicateAttr(k));
            }
            list.push((k, v.into()));
        }
        if tag.is_void() && !children.is_empty() {
            return Err(HtmlError::VoidChildren(tag));
        }
        Ok(Html::Element { tag, attrs: list, children })
    }

    pub fn text(s: impl Into<String>) -> Html {
        Html::Text(s.into())
    }

    /// An element without attributes.
    pub fn node(tag: Tag, children: Vec<Html>) -> Html {
        assert!(!tag.is_void() || children.is_empty(), "<{tag}> cannot have children");
        Html::Element { tag, attrs: Vec::new(), children }
    }

    pub fn div(children: Vec<Html>) -> Html {
        Html::node(Tag::Div, children)
    }

    pub fn p(children: Vec<Html>) -> Html {
        Html::node(Tag::P, children)
    }
}

/// Escapes `& < > "` as character entities.
pub fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
}

pub fn render_html(h: &Html) -> String {
    let mut out = String::new();
    write_html(h, &mut out);
    out
}

/// Renders a node sequence back to back.
pub fn render_nodes(nodes: &[Html]) -> String {
    let mut out = String::new();
    for n in nodes {
        write_html(n, &mut out);
    }
    out
}

fn write_html(h: &Html, out: &mut String) {
    match h {
        Html::Text(s) => escape(s, out),
        Html::Element { tag, attrs, children } => {
            out.push('<');
            out.push_str(tag.name());
            for (k, v) in attrs {
                out.push(' ');
                out.push_str(k);
                out.push_str("=\"");
                escape(v, out);
                out.push('"');
            }
            if tag.is_void() {
                out.push_str(" />");
                return;
            }
            out.push('>');
            for c in children {
                write_html(c, out);
            }
            out.push_str("</");
            out.push_str(tag.name());
            out.push('>');
        }
    }
}

impl fmt::Display for Html {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_html(self))
    }
}
