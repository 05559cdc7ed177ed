#include "sankarm/sankey.hpp"
#include "sankarm/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <map>

namespace sankarm {

std::vector<FlowEdge> rule_flow(const ScoredRule& rule, const FeatureCatalog& catalog) {
    const auto& ante = rule.rule.antecedent();
    const auto& cons = rule.rule.consequent();
    if (ante.empty() || cons.empty())
        throw Error("internal: rule with an empty side reached the sankey stage");
    std::vector<FlowEdge> edges;
    for (std::size_t i = 0; i + 1 < ante.size(); ++i)
        edges.push_back({format_item(ante[i], catalog), format_item(ante[i + 1], catalog), rule.fitness});
    const auto last = format_item(ante.back(), catalog);
    for (const auto& c : cons)
        edges.push_back({last, format_item(c, catalog), rule.fitness});
    return edges;
}

SankeyGraph build_flow(const RuleSelection& selection, const FeatureCatalog& catalog) {
    if (selection.chosen.empty())
        throw ArgumentError("cannot build a flow graph from an empty selection");
    SankeyGraph g;
    std::map<std::string, std::size_t> node_index;
    auto node = [&](const std::string& name) {
        auto [it, inserted] = node_index.try_emplace(name, g.nodes.size());
        if (inserted)
            g.nodes.push_back(name);
        return it->second;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> link_index;
    for (const auto& r : selection.chosen) {
        for (const auto& item : r.rule.antecedent())
            node(format_item(item, catalog));
        for (const auto& item : r.rule.consequent())
            node(format_item(item, catalog));
        for (const auto& e : rule_flow(r, catalog)) {
            const std::pair key{node(e.source), node(e.target)};
            auto [it, inserted] = link_index.try_emplace(key, g.links.size());
            if (inserted)
                g.links.push_back({key.first, key.second, e.value});
            else
                g.links[it->second].value += e.value;
        }
    }
    return g;
}

std::string format_value(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0')
            s.pop_back();
        if (s.back() == '.')
            s.pop_back();
    }
    if (s == "-0")
        s = "0";
    return s;
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            if (c < 0x20 || c == '<' || c == '>' || c == '&') {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(static_cast<char>(c));
            }
        }
    }
    out.push_back('"');
}

std::string html_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

void validate(const SankeyGraph& g) {
    for (const auto& l : g.links) {
        if (l.source >= g.nodes.size() || l.target >= g.nodes.size())
            throw SchemaError("sankey link index out of range");
        if (l.source == l.target)
            throw SchemaError("sankey link is a self-loop");
        if (!(l.value > 0.0))
            throw SchemaError("sankey link value must be positive");
    }
}

} // namespace

std::string emit_json(const SankeyGraph& graph) {
    std::string out = "{\"nodes\":[";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (i)
            out.push_back(',');
        out += "{\"name\":";
        append_json_string(out, graph.nodes[i]);
        out.push_back('}');
    }
    out += "],\"links\":[";
    for (std::size_t i = 0; i < graph.links.size(); ++i) {
        const auto& l = graph.links[i];
        if (i)
            out.push_back(',');
        out += "{\"source\":" + std::to_string(l.source) + ",\"target\":" + std::to_string(l.target) +
               ",\"value\":" + format_value(l.value) + "}";
    }
    out += "]}";
    return out;
}

SankeyGraph sankey_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sankey JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array() || !doc.contains("links") ||
        !doc["links"].is_array())
        throw SchemaError("sankey JSON needs \"nodes\" and \"links\" arrays");
    SankeyGraph g;
    for (const auto& n : doc["nodes"]) {
        if (!n.is_object() || !n.contains("name") || !n["name"].is_string())
            throw SchemaError("sankey node needs a string \"name\"");
        g.nodes.push_back(n["name"].get<std::string>());
    }
    for (const auto& l : doc["links"]) {
        if (!l.is_object() || !l.contains("source") || !l["source"].is_number_unsigned() || !l.contains("target") ||
            !l["target"].is_number_unsigned() || !l.contains("value") || !l["value"].is_number())
            throw SchemaError("sankey link needs integer \"source\"/\"target\" and numeric \"value\"");
        g.links.push_back({l["source"].get<std::size_t>(), l["target"].get<std::size_t>(), l["value"].get<double>()});
    }
    validate(g);
    return g;
}

namespace {

// Column = longest path from a source (cycles cut after n passes); nodes are
// stacked per column and links drawn as cubic curves with width ~ value.
constexpr std::string_view kRenderer = R"JS(
(function () {
  var NS = "http://www.w3.org/2000/svg";
  function el(name, attrs) {
    var e = document.createElementNS(NS, name);
    for (var k in attrs) e.setAttribute(k, attrs[k]);
    return e;
  }
  function draw(host, data) {
    var n = data.nodes.length, depth = new Array(n).fill(0);
    for (var pass = 0; pass < n; pass++) {
      var changed = false;
      data.links.forEach(function (l) {
        if (depth[l.target] < depth[l.source] + 1 && depth[l.source] + 1 < n) {
          depth[l.target] = depth[l.source] + 1; changed = true;
        }
      });
      if (!changed) break;
    }
    var inflow = new Array(n).fill(0), outflow = new Array(n).fill(0);
    data.links.forEach(function (l) { outflow[l.source] += l.value; inflow[l.target] += l.value; });
    var size = inflow.map(function (v, i) { return Math.max(v, outflow[i]); });
    var cols = Math.max.apply(null, depth) + 1, W = 760, H = 360, pad = 14, nodeW = 14;
    var colTotals = new Array(cols).fill(0), colCounts = new Array(cols).fill(0);
    size.forEach(function (s, i) { colTotals[depth[i]] += s; colCounts[depth[i]]++; });
    var scale = Infinity;
    for (var c = 0; c < cols; c++)
      if (colTotals[c] > 0) scale = Math.min(scale, (H - pad * (colCounts[c] + 1)) / colTotals[c]);
    if (!isFinite(scale)) scale = 1;
    var x = [], y = [], h = [], cursor = new Array(cols).fill(pad);
    for (var i = 0; i < n; i++) {
      x[i] = cols > 1 ? depth[i] * (W - 180 - nodeW) / (cols - 1) + 10 : 10;
      h[i] = Math.max(2, size[i] * scale);
      y[i] = cursor[depth[i]]; cursor[depth[i]] += h[i] + pad;
    }
    var svg = el("svg", {width: W, height: H, viewBox: "0 0 " + W + " " + H});
    var outY = y.slice(), inY = y.slice();
    data.links.forEach(function (l) {
      var w = Math.max(1, l.value * scale), s = l.source, t = l.target;
      var x0 = x[s] + nodeW, x1 = x[t], y0 = outY[s] + w / 2, y1 = inY[t] + w / 2;
      outY[s] += w; inY[t] += w;
      var mx = (x0 + x1) / 2;
      var p = el("path", {d: "M" + x0 + "," + y0 + " C" + mx + "," + y0 + " " + mx + "," + y1 + " " + x1 + "," + y1,
                          fill: "none", stroke: "#7a9cc6", "stroke-opacity": 0.5, "stroke-width": w});
      var tip = el("title", {}); tip.textContent = data.nodes[s] + " → " + data.nodes[t] + ": " + l.value;
      p.appendChild(tip); svg.appendChild(p);
    });
    for (var j = 0; j < n; j++) {
      svg.appendChild(el("rect", {x: x[j], y: y[j], width: nodeW, height: h[j], fill: "#34495e"}));
      var label = el("text", {x: x[j] + nodeW + 4, y: y[j] + h[j] / 2, "dominant-baseline": "middle",
                              "font-size": 12, "font-family": "sans-serif"});
      label.textContent = data.nodes[j]; svg.appendChild(label);
    }
    host.appendChild(svg);
  }
  document.querySelectorAll("script[data-sankey]").forEach(function (s) {
    draw(document.getElementById(s.getAttribute("data-sankey")), JSON.parse(s.textContent));
  });
})();
)JS";

} // namespace

std::string emit_report(const std::vector<std::pair<std::string, SankeyGraph>>& graphs) {
    if (graphs.empty())
        throw ArgumentError("report needs at least one graph");
    std::string out;
    out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>Association rules over time</title>\n";
    out += "<style>body{font-family:sans-serif;margin:2em}section{margin-bottom:2em}"
           "h2{margin-bottom:0.2em}p.label{color:#666;margin-top:0}</style>\n";
    out += "</head>\n<body>\n<h1>Association rules over time</h1>\n";
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto id = "sankey-" + std::to_string(i + 1);
        out += "<section>\n<h2>Time period " + std::to_string(i + 1) + "</h2>\n";
        out += "<p class=\"label\">" + html_escape(graphs[i].first) + "</p>\n";
        out += "<div id=\"" + id + "\"></div>\n";
        out += "<script type=\"application/json\" data-sankey=\"" + id + "\">" + emit_json(graphs[i].second) +
               "</script>\n</section>\n";
    }
    out += "<script>";
    out += kRenderer;
    out += "</script>\n</body>\n</html>\n";
    return out;
}

} // namespace sankarm
