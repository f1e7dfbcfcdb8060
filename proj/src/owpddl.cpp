#include "spotter/owpddl.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace spotter::owpddl {

namespace {

std::string lower(std::string s) {
    for (char &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Token {
    enum Kind { LParen, RParen, Symbol, End } kind;
    std::string text;
    int line;
    int column;
};

std::vector<Token> tokenize(const std::string &text) {
    std::vector<Token> tokens;
    int line = 1, column = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ';') {
            while (i < text.size() && text[i] != '\n')
                advance(text[i++]);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
            ++i;
            continue;
        }
        if (c == '(') {
            tokens.push_back({Token::LParen, "(", line, column});
            advance(c);
            ++i;
            continue;
        }
        if (c == ')') {
            tokens.push_back({Token::RParen, ")", line, column});
            advance(c);
            ++i;
            continue;
        }
        int start_line = line, start_col = column;
        std::string sym;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               text[i] != '(' && text[i] != ')' && text[i] != ';') {
            sym += text[i];
            advance(text[i]);
            ++i;
        }
        tokens.push_back({Token::Symbol, sym, start_line, start_col});
    }
    tokens.push_back({Token::End, "", line, column});
    return tokens;
}

class Parser {
public:
    explicit Parser(const std::string &text) : tokens_(tokenize(text)) {}

    const Token &peek() const { return tokens_[pos_]; }

    Token next() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const Token &at, const std::string &message) const {
        throw ParseError(at.line, at.column, message);
    }

    void expect_lparen(const std::string &context) {
        Token t = next();
        if (t.kind != Token::LParen)
            fail(t, "expected '(' " + context);
    }

    void expect_rparen(const std::string &context) {
        Token t = next();
        if (t.kind != Token::RParen)
            fail(t, "expected ')' " + context + ", got '" + t.text + "'");
    }

    std::string expect_symbol(const std::string &context) {
        Token t = next();
        if (t.kind != Token::Symbol)
            fail(t, "expected symbol " + context);
        return t.text;
    }

    // Keyword comparison is case-insensitive.
    bool at_symbol(const std::string &keyword) const {
        return peek().kind == Token::Symbol && lower(peek().text) == keyword;
    }

    void expect_keyword(const std::string &keyword) {
        Token t = next();
        if (t.kind != Token::Symbol || lower(t.text) != keyword)
            fail(t, "expected '" + keyword + "'");
    }

    bool done() const { return peek().kind == Token::End; }

    SchemaAtom parse_atom() {
        expect_lparen("to open an atom");
        SchemaAtom atom;
        atom.predicate = expect_symbol("as a predicate name");
        while (peek().kind == Token::Symbol)
            atom.args.push_back(next().text);
        expect_rparen("to close the atom");
        return atom;
    }

    SchemaLiteral parse_literal() {
        Token open = peek();
        expect_lparen("to open a literal");
        if (at_symbol("not")) {
            next();
            SchemaLiteral lit{parse_atom(), false};
            expect_rparen("to close (not ...)");
            return lit;
        }
        // Re-parse as a plain atom from the '(' we consumed.
        SchemaAtom atom;
        Token name = next();
        if (name.kind != Token::Symbol)
            fail(open, "expected a predicate name");
        atom.predicate = name.text;
        while (peek().kind == Token::Symbol)
            atom.args.push_back(next().text);
        expect_rparen("to close the atom");
        return SchemaLiteral{atom, true};
    }

    // A condition is a single literal or (and literal*).
    std::vector<SchemaLiteral> parse_condition() {
        std::vector<SchemaLiteral> lits;
        Token open = peek();
        if (open.kind != Token::LParen)
            fail(open, "expected a condition");
        // Look ahead for "and".
        if (tokens_[pos_ + 1].kind == Token::Symbol && lower(tokens_[pos_ + 1].text) == "and") {
            next(); // (
            next(); // and
            while (peek().kind == Token::LParen)
                lits.push_back(parse_literal());
            expect_rparen("to close (and ...)");
        } else {
            lits.push_back(parse_literal());
        }
        return lits;
    }

    std::vector<SchemaAtom> parse_atom_list() {
        std::vector<SchemaAtom> atoms;
        Token open = peek();
        if (open.kind != Token::LParen)
            fail(open, "expected an atom list");
        if (tokens_[pos_ + 1].kind == Token::Symbol && lower(tokens_[pos_ + 1].text) == "and") {
            next();
            next();
            while (peek().kind == Token::LParen)
                atoms.push_back(parse_atom());
            expect_rparen("to close (and ...)");
        } else {
            atoms.push_back(parse_atom());
        }
        return atoms;
    }

    // name+ [- type] repeated; used by :types, :objects and :parameters.
    void parse_typed_list(std::vector<std::pair<std::string, std::string>> &out,
                          const std::string &default_type) {
        std::vector<std::string> pending;
        while (peek().kind == Token::Symbol) {
            std::string sym = next().text;
            if (sym == "-") {
                std::string type = expect_symbol("as a type name");
                for (const std::string &name : pending)
                    out.emplace_back(name, type);
                pending.clear();
            } else {
                pending.push_back(sym);
            }
        }
        for (const std::string &name : pending)
            out.emplace_back(name, default_type);
    }

    ActionSchema parse_action() {
        ActionSchema action;
        action.name = expect_symbol("as an action name");
        bool saw_parameters = false, saw_effect = false;
        while (peek().kind == Token::Symbol && peek().text[0] == ':') {
            std::string section = lower(next().text);
            if (section == ":parameters") {
                saw_parameters = true;
                expect_lparen("to open :parameters");
                std::vector<std::pair<std::string, std::string>> params;
                parse_typed_list(params, "object");
                expect_rparen("to close :parameters");
                for (auto &[name, type] : params) {
                    if (name.empty() || name[0] != '?')
                        fail(peek(), "parameter names must start with '?'");
                    action.param_names.push_back(name);
                    action.param_types.push_back(type);
                }
            } else if (section == ":precondition") {
                action.pre = parse_condition();
            } else if (section == ":effect") {
                saw_effect = true;
                action.eff = parse_condition();
            } else if (section == ":unknown") {
                action.unknown = parse_atom_list();
            } else {
                fail(peek(), "unknown action section '" + section + "'");
            }
        }
        if (!saw_parameters || !saw_effect)
            fail(peek(), "action '" + action.name + "' needs :parameters and :effect");
        expect_rparen("to close the action");
        return action;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void validate_schema_atom(const DomainSource &domain, const ActionSchema &action,
                          const SchemaAtom &atom) {
    const PredicateSchema *pred = domain.find_predicate(atom.predicate);
    if (!pred)
        throw SemanticError("action " + action.name + ": unknown predicate '" +
                            atom.predicate + "'");
    if (pred->arity() != atom.args.size())
        throw SemanticError("action " + action.name + ": predicate '" + atom.predicate +
                            "' expects " + std::to_string(pred->arity()) + " arguments");
    for (const std::string &arg : atom.args) {
        if (!arg.empty() && arg[0] == '?') {
            bool found = std::find(action.param_names.begin(), action.param_names.end(),
                                   arg) != action.param_names.end();
            if (!found)
                throw SemanticError("action " + action.name + ": unbound variable '" +
                                    arg + "'");
        }
    }
}

} // namespace

bool DomainSource::has_type(const std::string &type) const {
    return type == "object" || type_parents.count(type) > 0;
}

bool DomainSource::type_is_a(const std::string &type, const std::string &ancestor) const {
    std::string current = type;
    for (;;) {
        if (current == ancestor)
            return true;
        auto it = type_parents.find(current);
        if (it == type_parents.end())
            return ancestor == "object" && current == "object";
        current = it->second;
    }
}

const PredicateSchema *DomainSource::find_predicate(const std::string &pred) const {
    for (const PredicateSchema &p : predicates)
        if (p.name == pred)
            return &p;
    return nullptr;
}

std::optional<std::string> ProblemSource::object_type(const std::string &object) const {
    for (const auto &[name, type] : objects)
        if (name == object)
            return type;
    return std::nullopt;
}

DomainSource parse_domain(const std::string &text) {
    Parser parser(text);
    DomainSource domain;

    parser.expect_lparen("to open (define ...)");
    parser.expect_keyword("define");
    parser.expect_lparen("to open (domain ...)");
    parser.expect_keyword("domain");
    domain.name = parser.expect_symbol("as the domain name");
    parser.expect_rparen("to close (domain ...)");

    while (parser.peek().kind == Token::LParen) {
        parser.next();
        std::string section = lower(parser.expect_symbol("as a section name"));
        if (section == ":requirements") {
            while (parser.peek().kind == Token::Symbol)
                parser.next(); // informational flags only
            parser.expect_rparen("to close :requirements");
        } else if (section == ":types") {
            std::vector<std::pair<std::string, std::string>> typed;
            parser.parse_typed_list(typed, "object");
            parser.expect_rparen("to close :types");
            for (auto &[name, parent] : typed)
                domain.type_parents[name] = parent;
            for (auto &[name, parent] : domain.type_parents) {
                (void)name;
                if (parent != "object" && !domain.type_parents.count(parent))
                    throw SemanticError("unknown parent type '" + parent + "'");
            }
        } else if (section == ":predicates") {
            while (parser.peek().kind == Token::LParen) {
                parser.next();
                PredicateSchema pred;
                pred.name = parser.expect_symbol("as a predicate name");
                std::vector<std::pair<std::string, std::string>> params;
                parser.parse_typed_list(params, "object");
                parser.expect_rparen("to close the predicate");
                for (auto &[pname, ptype] : params) {
                    pred.param_names.push_back(pname);
                    pred.param_types.push_back(ptype);
                    if (!domain.has_type(ptype))
                        throw SemanticError("predicate " + pred.name + ": unknown type '" +
                                            ptype + "'");
                }
                domain.predicates.push_back(std::move(pred));
            }
            parser.expect_rparen("to close :predicates");
        } else if (section == ":action") {
            domain.actions.push_back(parser.parse_action());
        } else {
            throw SemanticError("unknown domain section '" + section + "'");
        }
    }
    parser.expect_rparen("to close (define ...)");

    std::set<std::string> action_names;
    for (const ActionSchema &action : domain.actions) {
        if (!action_names.insert(action.name).second)
            throw SemanticError("duplicate action name '" + action.name + "'");
        for (const std::string &type : action.param_types)
            if (!domain.has_type(type))
                throw SemanticError("action " + action.name + ": unknown type '" + type + "'");
        for (const SchemaLiteral &lit : action.pre)
            validate_schema_atom(domain, action, lit.atom);
        for (const SchemaLiteral &lit : action.eff)
            validate_schema_atom(domain, action, lit.atom);
        for (const SchemaAtom &atom : action.unknown) {
            const PredicateSchema *pred = domain.find_predicate(atom.predicate);
            if (!pred)
                throw SemanticError("action " + action.name + ": unknown predicate '" +
                                    atom.predicate + "' in :unknown");
        }
    }
    return domain;
}

ProblemSource parse_problem(const std::string &text) {
    Parser parser(text);
    ProblemSource problem;

    parser.expect_lparen("to open (define ...)");
    parser.expect_keyword("define");
    parser.expect_lparen("to open (problem ...)");
    parser.expect_keyword("problem");
    problem.name = parser.expect_symbol("as the problem name");
    parser.expect_rparen("to close (problem ...)");

    while (parser.peek().kind == Token::LParen) {
        parser.next();
        std::string section = lower(parser.expect_symbol("as a section name"));
        if (section == ":domain") {
            problem.domain_name = parser.expect_symbol("as the domain name");
            parser.expect_rparen("to close :domain");
        } else if (section == ":objects") {
            parser.parse_typed_list(problem.objects, "object");
            parser.expect_rparen("to close :objects");
        } else if (section == ":init") {
            while (parser.peek().kind == Token::LParen)
                problem.init.push_back(parser.parse_atom());
            parser.expect_rparen("to close :init");
        } else if (section == ":goal") {
            problem.goal = parser.parse_condition();
            parser.expect_rparen("to close :goal");
        } else {
            throw SemanticError("unknown problem section '" + section + "'");
        }
    }
    parser.expect_rparen("to close (define ...)");
    return problem;
}

namespace {

struct Grounder {
    const DomainSource &domain;
    const ProblemSource &problem;
    std::vector<Fluent> fluents;
    std::set<Fluent> fluent_set;

    Grounder(const DomainSource &d, const ProblemSource &p) : domain(d), problem(p) {
        for (const auto &[name, type] : problem.objects)
            if (!domain.has_type(type))
                throw SemanticError("object " + name + ": unknown type '" + type + "'");
        for (const PredicateSchema &pred : domain.predicates)
            enumerate_fluents(pred);
        std::sort(fluents.begin(), fluents.end());
        fluents.erase(std::unique(fluents.begin(), fluents.end()), fluents.end());
        fluent_set.insert(fluents.begin(), fluents.end());
    }

    void enumerate_fluents(const PredicateSchema &pred) {
        std::vector<std::string> args(pred.arity());
        enumerate_fluents_from(pred, 0, args);
    }

    void enumerate_fluents_from(const PredicateSchema &pred, std::size_t index,
                                std::vector<std::string> &args) {
        if (index == pred.arity()) {
            fluents.emplace_back(pred.name, args);
            return;
        }
        for (const auto &[name, type] : problem.objects) {
            if (domain.type_is_a(type, pred.param_types[index])) {
                args[index] = name;
                enumerate_fluents_from(pred, index + 1, args);
            }
        }
    }

    bool well_typed(const SchemaAtom &atom) const {
        const PredicateSchema *pred = domain.find_predicate(atom.predicate);
        if (!pred || pred->arity() != atom.args.size())
            return false;
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            auto type = problem.object_type(atom.args[i]);
            if (!type)
                return false;
            if (!domain.type_is_a(*type, pred->param_types[i]))
                return false;
        }
        return true;
    }

    SchemaAtom bind(const SchemaAtom &atom, const ActionSchema &schema,
                    const std::vector<std::string> &binding) const {
        SchemaAtom out;
        out.predicate = atom.predicate;
        for (const std::string &arg : atom.args) {
            if (!arg.empty() && arg[0] == '?') {
                auto it = std::find(schema.param_names.begin(), schema.param_names.end(), arg);
                if (it == schema.param_names.end())
                    throw SemanticError("action " + schema.name + ": unbound variable '" +
                                        arg + "'");
                out.args.push_back(binding[it - schema.param_names.begin()]);
            } else {
                if (!problem.object_type(arg))
                    throw SemanticError("action " + schema.name + ": unknown object '" +
                                        arg + "'");
                out.args.push_back(arg);
            }
        }
        return out;
    }

    // Builds one ground operator; nullopt when a positive ill-typed
    // precondition makes the instance vacuously inapplicable.
    std::optional<Operator> instantiate(const ActionSchema &schema,
                                        const std::vector<std::string> &binding,
                                        std::vector<std::string> &warnings) const {
        std::string name = schema.name;
        if (!binding.empty()) {
            name += "(";
            for (std::size_t i = 0; i < binding.size(); ++i) {
                if (i > 0)
                    name += ",";
                name += binding[i];
            }
            name += ")";
        }

        std::vector<Literal> pre;
        for (const SchemaLiteral &lit : schema.pre) {
            SchemaAtom atom = bind(lit.atom, schema, binding);
            if (!well_typed(atom)) {
                if (lit.positive)
                    return std::nullopt; // requires a fluent that does not exist
                continue;                // negation of a nonexistent fluent holds
            }
            pre.emplace_back(Fluent(atom.predicate, atom.args), lit.positive);
        }

        std::vector<Literal> eff;
        for (const SchemaLiteral &lit : schema.eff) {
            SchemaAtom atom = bind(lit.atom, schema, binding);
            if (!well_typed(atom))
                throw SemanticError("action " + schema.name + ": ill-typed effect on " +
                                    atom.predicate);
            eff.emplace_back(Fluent(atom.predicate, atom.args), lit.positive);
        }

        std::set<Fluent> non_static;
        for (const Literal &lit : eff)
            non_static.insert(lit.fluent);
        for (const SchemaAtom &entry : schema.unknown) {
            bool has_variable = false;
            for (const std::string &arg : entry.args)
                if (!arg.empty() && arg[0] == '?')
                    has_variable = true;
            if (has_variable) {
                for (const Fluent &f : fluents)
                    if (f.predicate == entry.predicate)
                        non_static.insert(f);
            } else {
                if (!well_typed(entry))
                    throw SemanticError("action " + schema.name +
                                        ": ill-typed :unknown atom on " + entry.predicate);
                non_static.insert(Fluent(entry.predicate, entry.args));
            }
        }

        std::set<Fluent> statics;
        for (const Fluent &f : fluents)
            if (!non_static.count(f))
                statics.insert(f);

        try {
            return Operator(name, PartialFluentState(pre), PartialFluentState(eff),
                            statics);
        } catch (const std::exception &e) {
            warnings.push_back("dropped " + name + ": " + e.what());
            return std::nullopt;
        }
    }

    std::vector<Operator> ground_schema(const ActionSchema &schema,
                                        std::vector<std::string> &warnings) const {
        std::vector<Operator> ops;
        std::vector<std::string> binding(schema.param_names.size());
        ground_schema_from(schema, 0, binding, ops, warnings);
        return ops;
    }

    void ground_schema_from(const ActionSchema &schema, std::size_t index,
                            std::vector<std::string> &binding, std::vector<Operator> &ops,
                            std::vector<std::string> &warnings) const {
        if (index == schema.param_names.size()) {
            if (auto op = instantiate(schema, binding, warnings))
                ops.push_back(std::move(*op));
            return;
        }
        for (const auto &[name, type] : problem.objects) {
            if (domain.type_is_a(type, schema.param_types[index])) {
                binding[index] = name;
                ground_schema_from(schema, index + 1, binding, ops, warnings);
            }
        }
    }

    FluentState closed_world_initial() const {
        std::set<Fluent> positives;
        for (const SchemaAtom &atom : problem.init) {
            if (!well_typed(atom))
                throw SemanticError("initial atom on '" + atom.predicate +
                                    "' is unknown or ill-typed");
            positives.insert(Fluent(atom.predicate, atom.args));
        }
        std::vector<Literal> lits;
        for (const Fluent &f : fluents)
            lits.emplace_back(f, positives.count(f) > 0);
        return FluentState(lits);
    }

    PartialFluentState goal_state() const {
        std::vector<Literal> lits;
        for (const SchemaLiteral &lit : problem.goal) {
            if (!well_typed(lit.atom))
                throw SemanticError("goal atom on '" + lit.atom.predicate +
                                    "' is unknown or ill-typed");
            lits.emplace_back(Fluent(lit.atom.predicate, lit.atom.args), lit.positive);
        }
        return PartialFluentState(lits);
    }
};

} // namespace

GroundResult ground(const DomainSource &domain, const ProblemSource &problem) {
    Grounder grounder(domain, problem);
    GroundResult result;
    std::vector<Operator> ops;
    for (const ActionSchema &schema : domain.actions) {
        auto schema_ops = grounder.ground_schema(schema, result.warnings);
        ops.insert(ops.end(), schema_ops.begin(), schema_ops.end());
    }
    result.task = StripsTask(grounder.fluents, std::move(ops),
                             grounder.closed_world_initial(), grounder.goal_state());
    return result;
}

GroundOperators ground_actions(const DomainSource &domain, const ProblemSource &problem,
                               const std::vector<ActionSchema> &actions) {
    Grounder grounder(domain, problem);
    GroundOperators result;
    for (const ActionSchema &schema : actions) {
        auto ops = grounder.ground_schema(schema, result.warnings);
        result.operators.insert(result.operators.end(), ops.begin(), ops.end());
    }
    return result;
}

namespace {

std::string atom_text(const Fluent &f) {
    std::string out = "(" + f.predicate;
    for (const std::string &arg : f.args)
        out += " " + arg;
    out += ")";
    return out;
}

std::string literal_text(const Literal &lit) {
    return lit.positive ? atom_text(lit.fluent) : "(not " + atom_text(lit.fluent) + ")";
}

// Action names must stay single s-expression symbols.
std::string sanitize_name(const std::string &name) {
    std::string out;
    for (char c : name) {
        if (c == '(' || c == ',')
            out += '-';
        else if (c == ')')
            ; // drop
        else
            out += c;
    }
    return out;
}

} // namespace

std::string serialize_operator(const Operator &op, const std::vector<Fluent> &fluents) {
    std::ostringstream out;
    out << "(:action " << sanitize_name(op.name) << "\n";
    out << "  :parameters ()\n";
    out << "  :precondition (and";
    for (const Literal &lit : op.pre.literals())
        out << " " << literal_text(lit);
    out << ")\n";
    out << "  :effect (and";
    for (const Literal &lit : op.eff.literals())
        out << " " << literal_text(lit);
    out << ")\n";

    std::set<Fluent> effect_fluents;
    for (const Literal &lit : op.eff.literals())
        effect_fluents.insert(lit.fluent);
    std::vector<Fluent> unknown;
    for (const Fluent &f : fluents)
        if (!effect_fluents.count(f) && !op.static_fluents.count(f))
            unknown.push_back(f);
    out << "  :unknown (and";
    for (const Fluent &f : unknown)
        out << " " << atom_text(f);
    out << "))";
    return out.str();
}

std::string serialize_dump(const std::vector<DumpEntry> &entries,
                           const std::vector<Operator> &ops,
                           const std::vector<Fluent> &fluents) {
    std::ostringstream out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        char meta[128];
        std::snprintf(meta, sizeof meta, "; episode=%d value=%.6f preconds=%d\n",
                      entries[i].episode, entries[i].value, entries[i].precondition_count);
        out << meta << serialize_operator(ops[i], fluents) << "\n";
    }
    return out.str();
}

std::vector<DumpEntry> parse_dump(const std::string &text) {
    std::vector<DumpEntry> entries;

    // Metadata lives in comments, which the tokenizer strips, so scan
    // lines for metadata and parse each balanced (:action ...) block.
    std::vector<std::tuple<int, double, int>> metadata;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        int episode = -1, preconds = 0;
        double value = 0.0;
        if (std::sscanf(line.c_str(), "; episode=%d value=%lf preconds=%d", &episode,
                        &value, &preconds) == 3)
            metadata.emplace_back(episode, value, preconds);
    }

    std::size_t meta_index = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        // Skip to the next top-level '(' outside comments.
        if (text[pos] == ';') {
            while (pos < text.size() && text[pos] != '\n')
                ++pos;
            continue;
        }
        if (text[pos] != '(') {
            ++pos;
            continue;
        }
        int depth = 0;
        std::size_t start = pos;
        while (pos < text.size()) {
            if (text[pos] == ';') {
                while (pos < text.size() && text[pos] != '\n')
                    ++pos;
                continue;
            }
            if (text[pos] == '(')
                ++depth;
            else if (text[pos] == ')' && --depth == 0) {
                ++pos;
                break;
            }
            ++pos;
        }
        std::string block = text.substr(start, pos - start);

        Parser parser(block);
        parser.expect_lparen("to open (:action ...)");
        parser.expect_keyword(":action");
        DumpEntry entry;
        entry.schema = parser.parse_action();
        if (meta_index < metadata.size()) {
            auto [episode, value, preconds] = metadata[meta_index++];
            entry.episode = episode;
            entry.value = value;
            entry.precondition_count = preconds;
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace spotter::owpddl
