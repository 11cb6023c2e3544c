// UI/API agreement: displayed decimals and percentages must equal the
// service's exact rational values rounded at 4 significant digits.
// Fixtures are captured real service responses (scripts/gen_fixtures.py).

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { formatPercent, formatSignificant, percentWidth } from "../src/format.js";
import type { QueryResultJson } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

interface QueryFixture {
  theory: string;
  body: { evidence: Record<string, boolean>; target: string; action?: string };
  status: number;
  response: QueryResultJson;
}

const fixtures: QueryFixture[] = JSON.parse(
  readFileSync(join(here, "fixtures", "queries.json"), "utf8")
);

describe("fixtures", () => {
  it("cover 20 scripted toggle configurations", () => {
    expect(fixtures).toHaveLength(20);
  });

  it("include the east-only-evidence configuration", () => {
    const eastOnly = fixtures[0];
    expect(eastOnly.body.evidence["E-G0_0-7"]).toBe(true);
    expect(eastOnly.body.evidence).not.toHaveProperty("E-G1_0-7");
    const rest = Object.entries(eastOnly.body.evidence).filter(([k]) => k !== "E-G0_0-7");
    expect(rest.every(([, v]) => v === false)).toBe(true);
  });
});

describe("formatSignificant agrees with the service", () => {
  it("reproduces every decimal the service sent, from num/den alone", () => {
    let checked = 0;
    for (const fx of fixtures) {
      if (fx.status !== 200) continue;
      for (const value of Object.values(fx.response.likelihoods)) {
        expect(formatSignificant(BigInt(value.num), BigInt(value.den))).toBe(value.p);
        checked += 1;
      }
    }
    expect(checked).toBeGreaterThan(40);
  });
});

describe("formatSignificant edge cases", () => {
  it("matches the engine's hand-verified values", () => {
    expect(formatSignificant(1n, 2n)).toBe("0.5000");
    expect(formatSignificant(1n, 3n)).toBe("0.3333");
    expect(formatSignificant(2n, 3n)).toBe("0.6667");
    expect(formatSignificant(1n, 1n)).toBe("1.000");
    expect(formatSignificant(0n, 7n)).toBe("0");
    expect(formatSignificant(99996n, 100000n)).toBe("1.000"); // carry into a new digit
    expect(formatSignificant(1n, 8000n)).toBe("0.0001250");
  });

  it("rounds half to even like the service", () => {
    expect(formatSignificant(100050n, 1000000n)).toBe("0.1000"); // 1000.5 -> 1000
    expect(formatSignificant(100150n, 1000000n)).toBe("0.1002"); // 1001.5 -> 1002
    expect(formatSignificant(100015n, 1000000n)).toBe("0.1000"); // below half
  });

  it("formats percents", () => {
    expect(formatPercent(1n, 2n)).toBe("50.00%");
    expect(formatPercent(1n, 1n)).toBe("100.0%");
    expect(formatPercent(1n, 3n)).toBe("33.33%");
    expect(formatPercent(0n, 1n)).toBe("0%");
  });
});

describe("bar geometry", () => {
  it("widths sum to ~100 for a full distribution", () => {
    const actionFixtures = fixtures.filter(
      (f) => f.status === 200 && f.body.target === "actions"
    );
    for (const fx of actionFixtures) {
      const total = Object.values(fx.response.likelihoods)
        .map((v) => percentWidth(BigInt(v.num), BigInt(v.den)))
        .reduce((a, b) => a + b, 0);
      expect(Math.abs(total - 100)).toBeLessThan(0.05);
    }
  });
});
