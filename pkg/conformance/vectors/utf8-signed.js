//JSSignature:IiHOeOR8RfrsT3WSbXt+YdIpfnEibB5SeaXOKIB2aHuxs1ywguyOCin/OlDhnzxxlpAOfwxmgBAuNVZSOqP6rYBdc6i4V/Y4XrLTz3sY5eTrEv01ZpRUfH5JbksLCTEFcJR7QZvE+LFfWFzvMY/MlD08GJpv+ww4fKoOC0etRZ3BhpbcmsPW084ba8OOQtCLLhgB9Gmw9rjci/iS+Jhlc2Stt8mZ6LnqmQC1gUmNOc8Lg6l+XhmUn1JyrmunyJouK7Os2U4gyFsonTLvHz0NSpv7LNtfRSpibVQGItgwajJytMxIEPJ0thznATPNUKH0Kgh0HUtHjEOBPrh9wabWmw==
// localized 例え ✓ 🔒
const label = 'élément';
