/**
 * Gloss embedding: read a concepts file, encode every gloss, and write the
 * embeddings JSON-lines file plus a sidecar manifest.
 *
 * The output format matches the analysis toolkit's embeddings input: one
 * `{"id": ..., "vec": [...]}` object per line, all vectors one dimension.
 */

import { readFileSync, writeFileSync } from 'node:fs';

import { GlossEncoder, resolveEncoder } from './encoders.js';

export interface GlossRecord {
  id: string;
  gloss: string;
}

export interface EmbedManifest {
  model: string;
  dimension: number;
  rows: number;
}

export function readGlosses(conceptsPath: string): GlossRecord[] {
  const text = readFileSync(conceptsPath, 'utf-8');
  const records: GlossRecord[] = [];
  const seen = new Set<string>();
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let row: any;
    try {
      row = JSON.parse(line);
    } catch (err) {
      throw new Error(`${conceptsPath}:${i + 1}: invalid JSON: ${String(err)}`);
    }
    if (typeof row.id !== 'string' || row.id.length === 0) {
      throw new Error(`${conceptsPath}:${i + 1}: missing id`);
    }
    if (seen.has(row.id)) {
      throw new Error(`${conceptsPath}:${i + 1}: duplicate id ${JSON.stringify(row.id)}`);
    }
    seen.add(row.id);
    const gloss = typeof row.gloss === 'string' ? row.gloss.trim() : '';
    if (gloss.length === 0) {
      throw new Error(`${conceptsPath}:${i + 1}: empty gloss for id ${JSON.stringify(row.id)}`);
    }
    records.push({ id: row.id, gloss });
  }
  if (records.length === 0) {
    throw new Error(`${conceptsPath}: no concept records`);
  }
  return records;
}

export interface EmbedOptions {
  batchSize?: number;
}

export async function embedGlosses(
  conceptsPath: string,
  modelName: string,
  outPath: string,
  options: EmbedOptions = {},
): Promise<EmbedManifest> {
  const batchSize = options.batchSize ?? 64;
  const records = readGlosses(conceptsPath);
  const encoder: GlossEncoder = resolveEncoder(modelName);

  const vectors: number[][] = [];
  for (let start = 0; start < records.length; start += batchSize) {
    const batch = records.slice(start, start + batchSize);
    const encoded = await encoder.encode(batch.map((r) => r.gloss));
    if (encoded.length !== batch.length) {
      throw new Error(`encoder returned ${encoded.length} rows for ${batch.length} glosses`);
    }
    vectors.push(...encoded);
  }

  const dimension = vectors[0].length;
  for (const [index, vec] of vectors.entries()) {
    if (vec.length !== dimension) {
      throw new Error(`non-uniform embedding dimension at row ${index}`);
    }
    if (!vec.every((v) => Number.isFinite(v))) {
      throw new Error(`non-finite embedding for id ${records[index].id}`);
    }
    if (vec.every((v) => v === 0)) {
      throw new Error(`zero embedding for id ${records[index].id}`);
    }
  }

  const lines = records.map((record, i) =>
    JSON.stringify({ id: record.id, vec: vectors[i] }),
  );
  writeFileSync(outPath, lines.join('\n') + '\n', 'utf-8');

  const manifest: EmbedManifest = {
    model: encoder.name,
    dimension,
    rows: records.length,
  };
  writeFileSync(`${outPath}.manifest.json`, JSON.stringify(manifest, null, 2) + '\n', 'utf-8');
  return manifest;
}
