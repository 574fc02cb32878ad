#include "svc/uppaal_io.hpp"

#include <sstream>

namespace svc::upio {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\'': out += "&apos;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  std::string out;
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      static const std::pair<const char*, char> ents[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'},
          {"&apos;", '\''}, {"&quot;", '"'}};
      bool matched = false;
      for (auto [ent, ch] : ents) {
        size_t n = std::string(ent).size();
        if (s.compare(i, n, ent) == 0) {
          out += ch;
          i += n;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += s[i++];
  }
  return out;
}

std::string render_updates(const std::vector<tagen::Assignment>& updates) {
  std::string out;
  for (const auto& u : updates) {
    if (!out.empty()) out += ", ";
    out += u.target + " = " + render(u.value, core::RenderStyle::Model);
  }
  return out;
}

std::string global_declaration(const tagen::Network& net) {
  std::ostringstream o;
  const auto& g = net.decls;
  o << "// All quantities are integers; price scale factor: " << g.scale << "\n";
  if (!net.symbol_codes.empty()) {
    o << "// string encoding:";
    bool first = true;
    for (const auto& [s, code] : net.symbol_codes) {
      o << (first ? " " : ", ") << s << "=" << code;
      first = false;
    }
    o << "\n";
  }
  for (const auto& ch : g.channels)
    o << "chan " << ch.request << ", " << ch.response << ";  // " << ch.service
      << "\n";
  for (const auto& v : g.marker_bools)
    o << "bool " << v.name << " = " << (v.init ? "true" : "false") << ";\n";
  for (const auto& v : g.availability_bools)
    o << "bool " << v.name << " = " << (v.init ? "true" : "false") << ";\n";
  for (const auto& v : g.typed_vars)
    o << (v.is_bool ? "bool " : "int ") << v.name << " = "
      << (v.is_bool ? (v.init ? "true" : "false") : std::to_string(v.init))
      << ";\n";
  for (const auto& v : g.path_vars)
    o << "int " << v.name << " = " << v.init << ";\n";
  if (!g.requester_fields.empty()) {
    o << "typedef struct {\n";
    for (const auto& [dim, init] : g.requester_fields) {
      (void)init;
      o << "  int " << dim << ";\n";
    }
    o << "} TRequesterContext;\n";
    o << "TRequesterContext RequesterContext = {";
    bool first = true;
    for (const auto& [dim, init] : g.requester_fields) {
      (void)dim;
      o << (first ? " " : ", ") << init;
      first = false;
    }
    o << " };\n";
  }
  return o.str();
}

void emit_template(std::ostringstream& o, const tagen::Template& t) {
  o << "  <template>\n";
  o << "    <name x=\"0\" y=\"0\">" << xml_escape(t.name) << "</name>\n";
  if (!t.clocks.empty()) {
    std::string decl;
    for (const auto& c : t.clocks) decl += "clock " + c + ";\n";
    o << "    <declaration>" << xml_escape(decl) << "</declaration>\n";
  }
  std::map<std::string, std::string> ids;
  int n = 0;
  for (const auto& l : t.locations) {
    std::string id = "id" + std::to_string(n);
    ids[l.id] = id;
    int x = 200 * n, y = 120 * (n % 2);
    o << "    <location id=\"" << id << "\" x=\"" << x << "\" y=\"" << y
      << "\">\n";
    o << "      <name x=\"" << x - 10 << "\" y=\"" << y - 34 << "\">"
      << xml_escape(l.id) << "</name>\n";
    if (l.invariant)
      o << "      <label kind=\"invariant\" x=\"" << x - 10 << "\" y=\""
        << y + 18 << "\">"
        << xml_escape(l.invariant->first + "<=" +
                      std::to_string(l.invariant->second))
        << "</label>\n";
    if (l.committed) o << "      <committed/>\n";
    o << "    </location>\n";
    ++n;
  }
  o << "    <init ref=\"" << ids.at(t.initial) << "\"/>\n";
  for (const auto& e : t.edges) {
    o << "    <transition>\n";
    o << "      <source ref=\"" << ids.at(e.source) << "\"/>\n";
    o << "      <target ref=\"" << ids.at(e.target) << "\"/>\n";
    if (e.guard)
      o << "      <label kind=\"guard\">"
        << xml_escape(render(e.guard, core::RenderStyle::Model)) << "</label>\n";
    if (!e.sync_channel.empty())
      o << "      <label kind=\"synchronisation\">"
        << xml_escape(e.sync_channel + e.sync_dir) << "</label>\n";
    if (!e.updates.empty())
      o << "      <label kind=\"assignment\">"
        << xml_escape(render_updates(e.updates)) << "</label>\n";
    o << "    </transition>\n";
  }
  o << "  </template>\n";
}

}  // namespace

std::string export_model(const tagen::Network& net) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  o << "<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
       "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_1.dtd'>\n";
  o << "<nta>\n";
  o << "  <declaration>" << xml_escape(global_declaration(net))
    << "</declaration>\n";
  for (const auto& t : net.templates) emit_template(o, t);
  o << "  <system>" << xml_escape(net.system_line) << "</system>\n";
  o << "</nta>\n";
  return o.str();
}

std::string export_queries(const std::vector<tagen::Query>& queries) {
  std::ostringstream o;
  std::string last;
  for (const auto& q : queries) {
    if (q.category != last) {
      o << "// " << q.category << "\n";
      last = q.category;
    }
    o << q.text << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Read-back
// ---------------------------------------------------------------------------

namespace {

// Minimal cursor over the emitted subset: explicit tags, double-quoted
// attributes, no CDATA, no nested same-name elements.
struct Cursor {
  const std::string& s;
  size_t pos = 0;

  // Finds the next opening of `tag` before `end`, returns false if absent.
  bool find_open(const std::string& tag, size_t end, size_t& tag_close) {
    while (true) {
      size_t p = s.find("<" + tag, pos);
      if (p == std::string::npos || p >= end) return false;
      char c = s[p + tag.size() + 1];
      if (c != ' ' && c != '>' && c != '/') {
        pos = p + 1;
        continue;
      }
      pos = p;
      tag_close = s.find('>', p);
      if (tag_close == std::string::npos) throw XmlError("unterminated tag");
      return true;
    }
  }
};

std::string attr(const std::string& s, size_t open, size_t close,
                 const std::string& name) {
  size_t p = s.find(name + "=\"", open);
  if (p == std::string::npos || p > close) return "";
  p += name.size() + 2;
  size_t q = s.find('"', p);
  return s.substr(p, q - p);
}

// Body of an element whose open tag ends at `tag_close`; empty for
// self-closing tags. Sets `elem_end` past the closing tag.
std::string body(const std::string& s, const std::string& tag, size_t tag_close,
                 size_t& elem_end) {
  if (s[tag_close - 1] == '/') {
    elem_end = tag_close + 1;
    return "";
  }
  size_t close = s.find("</" + tag + ">", tag_close);
  if (close == std::string::npos) throw XmlError("missing </" + tag + ">");
  elem_end = close + tag.size() + 3;
  return s.substr(tag_close + 1, close - tag_close - 1);
}

}  // namespace

ParsedModel parse_model(const std::string& xml) {
  ParsedModel m;
  Cursor cur{xml};
  size_t tc, end;
  if (!cur.find_open("declaration", xml.size(), tc))
    throw XmlError("no global declaration");
  m.declaration = xml_unescape(body(xml, "declaration", tc, end));
  cur.pos = end;

  while (cur.find_open("template", xml.size(), tc)) {
    size_t tmpl_start = tc;
    size_t tmpl_close = xml.find("</template>", tmpl_start);
    if (tmpl_close == std::string::npos) throw XmlError("missing </template>");
    ParsedTemplate t;
    Cursor in{xml};
    in.pos = tmpl_start;

    size_t itc;
    if (!in.find_open("name", tmpl_close, itc)) throw XmlError("unnamed template");
    t.name = xml_unescape(body(xml, "name", itc, end));
    in.pos = end;
    size_t save = in.pos;
    if (in.find_open("declaration", tmpl_close, itc)) {
      t.declaration = xml_unescape(body(xml, "declaration", itc, end));
      in.pos = end;
    } else {
      in.pos = save;
    }

    while (in.find_open("location", tmpl_close, itc)) {
      size_t loc_open = in.pos;
      ParsedLocation l;
      l.id = attr(xml, loc_open, itc, "id");
      std::string inner = body(xml, "location", itc, end);
      Cursor li{inner};
      size_t ltc, lend;
      if (li.find_open("name", inner.size(), ltc))
        l.name = xml_unescape(body(inner, "name", ltc, lend));
      li.pos = 0;
      while (li.find_open("label", inner.size(), ltc)) {
        size_t lopen = li.pos;
        std::string kind = attr(inner, lopen, ltc, "kind");
        std::string text = xml_unescape(body(inner, "label", ltc, lend));
        if (kind == "invariant") l.invariant = text;
        li.pos = lend;
      }
      l.committed = inner.find("<committed/>") != std::string::npos;
      t.locations.push_back(l);
      in.pos = end;
    }

    in.pos = tmpl_start;
    if (in.find_open("init", tmpl_close, itc))
      t.init_ref = attr(xml, in.pos, itc, "ref");

    in.pos = tmpl_start;
    while (in.find_open("transition", tmpl_close, itc)) {
      std::string inner = body(xml, "transition", itc, end);
      ParsedTransition tr;
      Cursor ti{inner};
      size_t ttc, tend;
      if (ti.find_open("source", inner.size(), ttc)) {
        tr.source = attr(inner, ti.pos, ttc, "ref");
        body(inner, "source", ttc, tend);
        ti.pos = tend;
      }
      if (ti.find_open("target", inner.size(), ttc)) {
        tr.target = attr(inner, ti.pos, ttc, "ref");
        body(inner, "target", ttc, tend);
        ti.pos = tend;
      }
      while (ti.find_open("label", inner.size(), ttc)) {
        size_t lopen = ti.pos;
        std::string kind = attr(inner, lopen, ttc, "kind");
        tr.labels[kind] = xml_unescape(body(inner, "label", ttc, tend));
        ti.pos = tend;
      }
      t.transitions.push_back(tr);
      in.pos = end;
    }

    m.templates.push_back(std::move(t));
    cur.pos = tmpl_close + 11;
  }

  cur.pos = 0;
  size_t sys_pos = xml.rfind("<system>");
  if (sys_pos == std::string::npos) throw XmlError("no system line");
  Cursor sc{xml};
  sc.pos = sys_pos;
  if (sc.find_open("system", xml.size(), tc))
    m.system = xml_unescape(body(xml, "system", tc, end));
  return m;
}

}  // namespace svc::upio
