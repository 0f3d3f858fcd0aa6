#include <istream>
#include <ostream>

#include "alm/csv.hpp"
#include "alm/error.hpp"
#include "alm/market.hpp"

namespace alm {

namespace {

constexpr const char* kLedgerHeader =
    "step,seller_id,l_j,p_j,acquired,incorporated,cumulative_cost,loss_after";

bool parse_flag(const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw Error(ErrorKind::ParseError, "not a boolean: '" + text + "'");
}

}  // namespace

void write_ledger_csv(std::ostream& out, const std::vector<TransactionRecord>& ledger) {
  out << kLedgerHeader << '\n';
  for (const auto& r : ledger) {
    out << csv::join({std::to_string(r.step), r.seller_id, csv::format_real(r.loss_reduction),
                      csv::format_real(r.price), r.acquired ? "1" : "0",
                      r.incorporated ? "1" : "0", csv::format_real(r.cumulative_cost),
                      csv::format_real(r.loss_after)})
        << '\n';
  }
}

std::vector<TransactionRecord> read_ledger_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  if (csv::join(table.header) != kLedgerHeader) {
    throw Error(ErrorKind::SchemaMismatch, "ledger header must be " + std::string(kLedgerHeader));
  }
  std::vector<TransactionRecord> ledger;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    try {
      TransactionRecord r;
      r.step = static_cast<int>(csv::parse_real(f[0]));
      r.seller_id = f[1];
      r.loss_reduction = csv::parse_real(f[2]);
      r.price = csv::parse_real(f[3]);
      r.acquired = parse_flag(f[4]);
      r.incorporated = parse_flag(f[5]);
      r.cumulative_cost = csv::parse_real(f[6]);
      r.loss_after = csv::parse_real(f[7]);
      ledger.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError,
                  "ledger line " + std::to_string(table.line_numbers[i]) + ": " + e.what());
    }
  }
  return ledger;
}

}  // namespace alm
