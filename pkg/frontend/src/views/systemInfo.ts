import { ApiError, HubClient, SystemInfo } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle } from "./shared.js";

export const LEGAL_BASES = [
  "consent",
  "contract",
  "legal_obligation",
  "vital_interest",
  "public_task",
  "legitimate_interest",
] as const;

export interface SystemInfoFormValues {
  controller_name: string;
  controller_email: string;
  dpo_name: string;
  dpo_email: string;
  third_country_safeguards: string;
  legal_bases: string[];
  legitimate_interest_note: string;
  right_rectification_deletion_portability: boolean;
  right_withdraw_consent: boolean;
  right_lodge_complaint: boolean;
  provision_mandatory: boolean;
  consequences_note: string;
  data_subject_categories: string;
}

export function formValuesFrom(info: SystemInfo): SystemInfoFormValues {
  return {
    controller_name: info.controller_contact.name,
    controller_email: info.controller_contact.email,
    dpo_name: info.dpo_contact.name,
    dpo_email: info.dpo_contact.email,
    third_country_safeguards: info.third_country_safeguards ?? "",
    legal_bases: info.legal_bases.map((basis) => basis.basis),
    legitimate_interest_note: info.legitimate_interest_note ?? "",
    right_rectification_deletion_portability: info.right_rectification_deletion_portability,
    right_withdraw_consent: info.right_withdraw_consent,
    right_lodge_complaint: info.right_lodge_complaint,
    provision_mandatory: info.provision_mandatory,
    consequences_note: info.consequences_note,
    data_subject_categories: info.data_subject_categories.join(", "),
  };
}

export function payloadFrom(values: SystemInfoFormValues): Partial<SystemInfo> {
  return {
    controller_contact: {
      name: values.controller_name,
      email: values.controller_email,
      phone: "",
      address: "",
    },
    dpo_contact: { name: values.dpo_name, email: values.dpo_email, phone: "", address: "" },
    third_country_safeguards: values.third_country_safeguards || null,
    legal_bases: values.legal_bases.map((basis) => ({ basis, note: "" })),
    legitimate_interest_note: values.legitimate_interest_note || null,
    right_rectification_deletion_portability: values.right_rectification_deletion_portability,
    right_withdraw_consent: values.right_withdraw_consent,
    right_lodge_complaint: values.right_lodge_complaint,
    provision_mandatory: values.provision_mandatory,
    consequences_note: values.consequences_note,
    data_subject_categories: values.data_subject_categories
      .split(",")
      .map((category) => category.trim())
      .filter(Boolean),
  };
}

export type SubmitResult =
  | { ok: true; stored: SystemInfo }
  | { ok: false; field: string | null; message: string };

/** PUT the form's values; field-addressed API rejections come back for inline display. */
export async function submitSystemInfo(
  client: HubClient,
  values: SystemInfoFormValues,
): Promise<SubmitResult> {
  try {
    const stored = await client.setSystemInfo(payloadFrom(values));
    return { ok: true, stored };
  } catch (error) {
    if (error instanceof ApiError) {
      return { ok: false, field: error.problem.field ?? null, message: error.problem.message };
    }
    throw error;
  }
}

function fieldError(errors: Record<string, string>, field: string): VNode | null {
  const message = errors[field];
  if (!message) return null;
  return h("span", { class: "field-error", "data-field": field }, message);
}

function textField(
  label: string,
  name: keyof SystemInfoFormValues & string,
  value: string,
  errors: Record<string, string>,
): VNode {
  return h(
    "label",
    { class: "form-field", "data-name": name },
    label,
    h("input", { type: "text", name, value }),
    fieldError(errors, name),
  );
}

function checkboxField(
  label: string,
  name: keyof SystemInfoFormValues & string,
  checked: boolean,
  errors: Record<string, string>,
): VNode {
  return h(
    "label",
    { class: "form-field checkbox", "data-name": name },
    h("input", { type: "checkbox", name, checked }),
    label,
    fieldError(errors, name),
  );
}

export function systemInfoForm(
  values: SystemInfoFormValues,
  errors: Record<string, string>,
  status: string | null,
  onSubmit: (values: SystemInfoFormValues) => void,
): VNode {
  return h(
    "section",
    { class: "view system-info" },
    pageTitle("System-wide information"),
    status ? h("p", { class: "status" }, status) : null,
    h(
      "form",
      {
        class: "system-info-form",
        onsubmit: (event: Event) => {
          event.preventDefault();
          onSubmit(readForm(event.target as HTMLFormElement));
        },
      },
      h("h3", {}, "Controller"),
      textField("Name", "controller_name", values.controller_name, errors),
      textField("Email", "controller_email", values.controller_email, errors),
      h("h3", {}, "Data protection officer"),
      textField("Name", "dpo_name", values.dpo_name, errors),
      textField("Email", "dpo_email", values.dpo_email, errors),
      h("h3", {}, "Legal bases"),
      fieldError(errors, "legal_bases"),
      h(
        "div",
        { class: "legal-bases" },
        LEGAL_BASES.map((basis) =>
          h(
            "label",
            { class: "checkbox" },
            h("input", {
              type: "checkbox",
              name: "legal_bases",
              value: basis,
              checked: values.legal_bases.includes(basis),
            }),
            basis,
          ),
        ),
      ),
      textField(
        "Legitimate-interest note",
        "legitimate_interest_note",
        values.legitimate_interest_note,
        errors,
      ),
      h("h3", {}, "Transfers and rights"),
      textField(
        "Third-country safeguards",
        "third_country_safeguards",
        values.third_country_safeguards,
        errors,
      ),
      checkboxField(
        "Right to rectification, deletion, portability",
        "right_rectification_deletion_portability",
        values.right_rectification_deletion_portability,
        errors,
      ),
      checkboxField("Right to withdraw consent", "right_withdraw_consent", values.right_withdraw_consent, errors),
      checkboxField("Right to lodge a complaint", "right_lodge_complaint", values.right_lodge_complaint, errors),
      h("h3", {}, "Provision"),
      checkboxField("Provision mandatory", "provision_mandatory", values.provision_mandatory, errors),
      textField("Consequences of non-provision", "consequences_note", values.consequences_note, errors),
      textField(
        "Data subject categories (comma-separated)",
        "data_subject_categories",
        values.data_subject_categories,
        errors,
      ),
      h("button", { type: "submit" }, "Save"),
    ),
  );
}

function readForm(form: HTMLFormElement): SystemInfoFormValues {
  const text = (name: string): string =>
    (form.querySelector(`input[name=${name}]`) as HTMLInputElement | null)?.value ?? "";
  const flag = (name: string): boolean =>
    (form.querySelector(`input[name=${name}]`) as HTMLInputElement | null)?.checked ?? false;
  const bases = Array.from(
    form.querySelectorAll("input[name=legal_bases]:checked"),
  ).map((element) => (element as HTMLInputElement).value);
  return {
    controller_name: text("controller_name"),
    controller_email: text("controller_email"),
    dpo_name: text("dpo_name"),
    dpo_email: text("dpo_email"),
    third_country_safeguards: text("third_country_safeguards"),
    legal_bases: bases,
    legitimate_interest_note: text("legitimate_interest_note"),
    right_rectification_deletion_portability: flag("right_rectification_deletion_portability"),
    right_withdraw_consent: flag("right_withdraw_consent"),
    right_lodge_complaint: flag("right_lodge_complaint"),
    provision_mandatory: flag("provision_mandatory"),
    consequences_note: text("consequences_note"),
    data_subject_categories: text("data_subject_categories"),
  };
}
