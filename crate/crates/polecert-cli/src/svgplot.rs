//! Static SVG scatter and line plots: fixed frame, min/max tick labels,
//! no interactivity.

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn around(points: &[(f64, f64)]) -> Frame {
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if points.is_empty() {
            return Frame { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 };
        }
        // Pad 5% each side; degenerate extents get a unit pad.
        let xp = if x1 > x0 { 0.05 * (x1 - x0) } else { 1.0 };
        let yp = if y1 > y0 { 0.05 * (y1 - y0) } else { 1.0 };
        Frame { x0: x0 - xp, x1: x1 + xp, y0: y0 - yp, y1: y1 + yp }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn open_svg(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let (left, right, top, bottom) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let mut s = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">
<rect width="{W}" height="{H}" fill="white"/>
<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>
<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>
"#
    );
    let label = |x: f64, y: f64, anchor: &str, text: String| {
        format!(r#"<text x="{x}" y="{y}" font-size="12" text-anchor="{anchor}">{text}</text>"#)
    };
    s.push_str(&label(left, bottom + 16.0, "middle", format!("{:.6e}", frame.x0)));
    s.push('\n');
    s.push_str(&label(right, bottom + 16.0, "middle", format!("{:.6e}", frame.x1)));
    s.push('\n');
    s.push_str(&label(left - 6.0, bottom, "end", format!("{:.6e}", frame.y0)));
    s.push('\n');
    s.push_str(&label(left - 6.0, top + 4.0, "end", format!("{:.6e}", frame.y1)));
    s.push('\n');
    s.push_str(&label(0.5 * W, H - 8.0, "middle", x_label.to_string()));
    s.push('\n');
    s.push_str(&label(left, top - 10.0, "middle", y_label.to_string()));
    s.push('\n');
    s
}

pub fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let frame = Frame::around(points);
    let mut s = open_svg(&frame, x_label, y_label);
    for &(x, y) in points {
        s.push_str(&format!(
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
            frame.px(x),
            frame.py(y)
        ));
        s.push('\n');
    }
    s.push_str("</svg>\n");
    s
}

pub fn line_svg(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let frame = Frame::around(points);
    let mut s = open_svg(&frame, x_label, y_label);
    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    s.push_str(&format!(
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        path.join(" ")
    ));
    s.push_str("\n</svg>\n");
    s
}
