use std::fmt::Write as _;
use std::io::Write;

use super::graph::{Partition, SimilarityGraph};
use super::select::KTrace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;").replace('\'', "&apos;")
}

/// GraphML with a `cluster` attribute on nodes and `similarity` on edges.
pub fn to_graphml<T: Scalar>(ids: &[String], g: &SimilarityGraph<T>, partition: &Partition) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n");
    out.push_str("  <key id=\"similarity\" for=\"edge\" attr.name=\"similarity\" attr.type=\"double\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for (i, id) in ids.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <node id=\"{}\"><data key=\"cluster\">{}</data></node>",
            xml_escape(id),
            partition.community(i)
        );
    }
    for &(a, b, s) in g.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"similarity\">{:?}</data></edge>",
            xml_escape(&ids[a]),
            xml_escape(&ids[b]),
            s.to_f64_lossy()
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn write_edge_list<T: Scalar, W: Write>(ids: &[String], g: &SimilarityGraph<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["source", "target", "similarity"])?;
    for &(a, b, s) in g.edges() {
        w.write_record([ids[a].as_str(), ids[b].as_str(), &format!("{:?}", s.to_f64_lossy())])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_ktrace<W: Write>(traces: &[KTrace], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for t in traces {
        w.serialize(t)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_partition<W: Write>(ids: &[String], partition: &Partition, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "community"])?;
    for (i, id) in ids.iter().enumerate() {
        w.write_record([id.as_str(), &partition.community(i).to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphml_and_csv_shapes() {
        let ids: Vec<String> = ["a&b", "c", "d"].map(String::from).to_vec();
        let g = SimilarityGraph::from_edges(3, [(0, 1, 0.75)]).unwrap();
        let p = Partition::from_labels(&[0, 0, 1]);
        let xml = to_graphml(&ids, &g, &p);
        assert!(xml.contains("<node id=\"a&amp;b\"><data key=\"cluster\">1</data></node>"));
        assert!(xml.contains("<edge source=\"a&amp;b\" target=\"c\"><data key=\"similarity\">0.75</data></edge>"));
        assert!(xml.contains("edgedefault=\"undirected\""));

        let mut buf = Vec::new();
        write_edge_list(&ids, &g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "source,target,similarity\na&b,c,0.75\n");

        let mut buf = Vec::new();
        let t = KTrace {
            k: 2,
            isolate_fraction: 0.5,
            average_degree: 1.0,
            modularity: f64::NEG_INFINITY,
            p_if: 0.45,
            p_ad: 1.0,
            score: f64::NEG_INFINITY,
            n_edges: 0,
            n_communities: 3,
        };
        write_ktrace(&[t], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "K,IF,AD,Q,P_IF,P_AD,score,n_edges,n_communities");
        assert_eq!(text.lines().nth(1).unwrap(), "2,0.5,1.0,-inf,0.45,1.0,-inf,0,3");
    }
}
