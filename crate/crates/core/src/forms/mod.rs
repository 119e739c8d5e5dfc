//! HTML layout combinators and formlets.

mod formlet;
mod html;

pub use formlet::{
    field_name, input, parse_int, run_formlet, Collected, Enhancer, Formlet, Inputs, ValidationError,
};
pub use html::{escape, render_html, render_nodes, Html, HtmlError, Tag};

/// The data-retrieval page body: a prompt and a button, followed by the
/// empty paragraph that receives results.
pub fn main_page_body() -> Vec<Html> {
    let button = Html::element(Tag::Input, [("type", "Button"), ("value", "Get Data")], vec![])
        .expect("fixed attribute set");
    vec![
        Html::div(vec![Html::p(vec![Html::text("Press to retrieve data")]), button]),
        Html::p(vec![Html::text("")]),
    ]
}

/// Integer entry with a label, validation icon, buttons and container.
pub fn max_number_formlet() -> Formlet<i64> {
    input("100")
        .is_int("Must be int")
        .with_text_label("Enter max number:")
        .with_validation_icon()
        .with_submit_and_reset_buttons()
        .with_form_container()
}

/// The formlet and its result paragraph in one `<div>`.
pub fn formlet_section() -> Html {
    let mut nodes = max_number_formlet().render_at(0);
    nodes.push(Html::p(vec![Html::text("")]));
    Html::div(nodes)
}

/// A standalone HTML document holding both demo sections.
pub fn demo_document() -> String {
    let mut body = render_nodes(&main_page_body());
    body.push('\n');
    body.push_str(&render_html(&formlet_section()));
    format!(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>qx forms demo</title>\n</head>\n<body>\n{body}\n</body>\n</html>\n"
    )
}
