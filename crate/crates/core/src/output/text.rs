use super::fmt_num;
use crate::hac::Dendrogram;

/// Sideways ASCII tree, root first. Merge lines show the cluster id, height
/// and size; leaf lines show the label.
///
/// ```text
/// [4] height 4, 3 leaves
/// +-- [3] height 1, 2 leaves
/// |   +-- L0
/// |   `-- L1
/// `-- L2
/// ```
///
/// Children are listed by smallest leaf index, as in [`super::to_newick`].
pub fn render_text(dendrogram: &Dendrogram) -> String {
    fn node_line(d: &Dendrogram, id: usize) -> String {
        match d.merge(id) {
            None => d.labels[id].clone(),
            Some(m) => format!("[{}] height {}, {} leaves", m.id, fmt_num(m.height), m.size),
        }
    }
    fn children(d: &Dendrogram, id: usize, prefix: &str, out: &mut String) {
        let Some(pair) = d.ordered_children(id) else { return };
        for (i, child) in pair.into_iter().enumerate() {
            let last = i == 1;
            out.push_str(prefix);
            out.push_str(if last { "`-- " } else { "+-- " });
            out.push_str(&node_line(d, child));
            out.push('\n');
            let deeper = format!("{prefix}{}", if last { "    " } else { "|   " });
            children(d, child, &deeper, out);
        }
    }
    let root = dendrogram.root();
    let mut out = node_line(dendrogram, root);
    out.push('\n');
    children(dendrogram, root, "", &mut out);
    out
}
